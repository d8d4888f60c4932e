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
#include "skewcast/plot.hpp"
#include "skewcast/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iterator>

namespace skewcast
{

namespace
{

constexpr double width   = 800;
constexpr double height  = 480;
constexpr double margin_left   = 70;
constexpr double margin_right  = 20;
constexpr double margin_top    = 40;
constexpr double margin_bottom = 50;

struct Frame {
    double x_min, x_max, y_max;

    double px(double x) const
    {
        const double span = x_max > x_min ? x_max - x_min : 1.0;
        return margin_left + (x - x_min) / span * (width - margin_left - margin_right);
    }

    double py(double y) const
    {
        const double span = y_max > 0 ? y_max : 1.0;
        return height - margin_bottom - y / span * (height - margin_top - margin_bottom);
    }
};

double nice_step(double range)
{
    if (!(range > 0)) {
        return 1.0;
    }
    const double raw  = range / 5.0;
    const double base = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * base >= raw) {
            return m * base;
        }
    }
    return 10.0 * base;
}

std::string escape(std::string_view text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

void open_svg(std::string& svg, std::string_view title)
{
    fmt::format_to(std::back_inserter(svg),
                   "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                   "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                   width, height, width, height);
    fmt::format_to(std::back_inserter(svg), "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    fmt::format_to(std::back_inserter(svg), "<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                   width / 2, escape(title));
}

void draw_axes(std::string& svg, const Frame& f, std::string_view y_label)
{
    auto out = std::back_inserter(svg);
    const double x0 = f.px(f.x_min), x1 = f.px(f.x_max);
    const double y0 = f.py(0), y1 = f.py(f.y_max);
    fmt::format_to(out, "<g stroke=\"black\" stroke-width=\"1\">\n");
    fmt::format_to(out, "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", x0, y0, x1, y0);
    fmt::format_to(out, "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", x0, y0, x0, y1);
    fmt::format_to(out, "</g>\n");

    const double x_step = nice_step(f.x_max - f.x_min);
    for (double x = std::ceil(f.x_min / x_step) * x_step; x <= f.x_max + 1e-9; x += x_step) {
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", f.px(x), y0 + 18, x);
    }
    // axis extent, machine readable
    fmt::format_to(out, "<g class=\"x-range\" data-min=\"{:g}\" data-max=\"{:g}\"/>\n", f.x_min, f.x_max);
    const double y_step = nice_step(f.y_max);
    for (double y = 0; y <= f.y_max + 1e-9; y += y_step) {
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", x0 - 6, f.py(y) + 4, y);
    }
    fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">day since first reported death</text>\n",
                   (x0 + x1) / 2, height - 12);
    fmt::format_to(out, "<text transform=\"translate(16 {:.2f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                   (y0 + y1) / 2, escape(y_label));
}

void draw_band(std::string& svg, const Frame& f, const BandLayer& layer)
{
    auto out       = std::back_inserter(svg);
    const Band& b  = layer.band;
    const auto n   = b.day.size();
    fmt::format_to(out, "<polygon fill=\"{}\" fill-opacity=\"0.25\" stroke=\"none\" points=\"", layer.color);
    for (Eigen::Index i = 0; i < n; ++i) {
        fmt::format_to(out, "{:.2f},{:.2f} ", f.px(b.day[i]), f.py(b.values(i, 2)));
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        fmt::format_to(out, "{:.2f},{:.2f} ", f.px(b.day[i]), f.py(b.values(i, 1)));
    }
    fmt::format_to(out, "\"/>\n<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"", layer.color);
    for (Eigen::Index i = 0; i < n; ++i) {
        fmt::format_to(out, "{:.2f},{:.2f} ", f.px(b.day[i]), f.py(b.values(i, 0)));
    }
    fmt::format_to(out, "\"/>\n");
}

Frame frame_for(const std::vector<BandLayer>& layers, const std::vector<PlotPoint>& observed)
{
    if (layers.empty() || layers.front().band.day.size() == 0) {
        throw ArgumentError("plot: empty band");
    }
    Frame f{double(layers.front().band.day[0]), double(layers.front().band.day[layers.front().band.day.size() - 1]), 0.0};
    for (const auto& layer : layers) {
        f.y_max = std::max(f.y_max, layer.band.values.maxCoeff());
    }
    for (const auto& p : observed) {
        if (p.x >= f.x_min && p.x <= f.x_max) {
            f.y_max = std::max(f.y_max, p.y);
        }
    }
    f.y_max *= 1.05;
    return f;
}

} // namespace

std::string band_plot_svg(const BandLayer& layer, const std::vector<PlotPoint>& observed, std::string_view title,
                          std::string_view y_label)
{
    const Frame f = frame_for({layer}, observed);
    std::string svg;
    open_svg(svg, title);
    draw_axes(svg, f, y_label);
    draw_band(svg, f, layer);
    auto out = std::back_inserter(svg);
    fmt::format_to(out, "<g class=\"observed\" fill=\"black\">\n");
    for (const auto& p : observed) {
        if (p.x < f.x_min || p.x > f.x_max) {
            continue;
        }
        fmt::format_to(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" data-day=\"{:g}\"/>\n", f.px(p.x), f.py(p.y), p.x);
    }
    fmt::format_to(out, "</g>\n</svg>\n");
    return svg;
}

std::string overlay_plot_svg(const std::vector<BandLayer>& layers, std::string_view title, std::string_view y_label)
{
    const Frame f = frame_for(layers, {});
    std::string svg;
    open_svg(svg, title);
    draw_axes(svg, f, y_label);
    auto out = std::back_inserter(svg);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        draw_band(svg, f, layers[i]);
        const double ly = margin_top + 10 + 18 * double(i);
        fmt::format_to(out, "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"14\" height=\"10\" fill=\"{}\"/>\n",
                       width - 150, ly - 9, layers[i].color);
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", width - 130, ly, escape(layers[i].label));
    }
    fmt::format_to(out, "</svg>\n");
    return svg;
}

} // namespace skewcast
