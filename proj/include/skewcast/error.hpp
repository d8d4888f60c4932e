/*
* Copyright (C) 2026 The skewcast authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>

namespace skewcast
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller (bad probability, bad prior, bad config).
class ArgumentError : public Error
{
public:
    using Error::Error;
};

/// Input data could not be parsed or does not form a valid death series.
class DataError : public Error
{
public:
    using Error::Error;
};

/// The sampler could not start or produced unusable output.
class SamplerError : public Error
{
public:
    using Error::Error;
};

} // namespace skewcast
