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

#include <ostream>
#include <string>
#include <vector>

namespace skewcast
{

/// Process exit codes of the command-line tool.
namespace exit_code
{
inline constexpr int ok             = 0;
inline constexpr int data_error     = 1; ///< bad usage, unreadable or invalid input, I/O failure
inline constexpr int sampler_error  = 2;
inline constexpr int not_converged  = 3; ///< some R-hat above 1.01 (outputs are still written)
} // namespace exit_code

inline constexpr double rhat_limit = 1.01;

/**
 * Runs one of the subcommands fit, forecast, sensitivity or report.
 * `args` excludes the program name.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace skewcast
