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

#include "skewcast/quantities.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace skewcast
{

struct PlotPoint {
    double x;
    double y;
};

struct BandLayer {
    std::string label;
    std::string color; ///< any SVG colour, e.g. "#1f77b4"
    Band band;
};

/**
 * Standalone SVG: shaded 95% band polygon, mean line and observed points.
 * The x-axis spans exactly the band's first to last day; observed points
 * outside that range are not drawn.
 */
std::string band_plot_svg(const BandLayer& layer, const std::vector<PlotPoint>& observed, std::string_view title,
                          std::string_view y_label);

/// Several bands on shared axes with a legend.
std::string overlay_plot_svg(const std::vector<BandLayer>& layers, std::string_view title, std::string_view y_label);

} // namespace skewcast
