#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "franson/measurement.hpp"
#include "franson/montecarlo.hpp"
#include "franson/state.hpp"

// CSV and SVG emission. The CSV files are the data contract: deterministic,
// byte-stable for identical configs, each carrying a comment line with the
// config hash and the effective seed. The SVG is a convenience view written
// as plain text so no plotting dependency is needed.

namespace franson {

namespace detail {

inline std::string fmt(double x, const char* spec = "%.12g") {
    if (x == 0.0) x = 0.0;  // collapse negative zero
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

}  // namespace detail

inline std::string csv_comment(std::uint64_t config_hash, std::uint64_t seed,
                               const std::string& mode) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# config_hash=0x%016llx seed=%llu mode=%s\n",
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed), mode.c_str());
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string truth_csv(const TruthTable& table, std::uint64_t config_hash,
                             std::uint64_t seed) {
    std::string out = csv_comment(config_hash, seed, "ideal");
    out += "input,output,probability\n";
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < 4; ++o) {
            out += kOutcomeLabels[i];
            out += ',';
            out += kOutcomeLabels[o];
            out += ',';
            out += detail::fmt(table.p[i][o]);
            out += '\n';
        }
    return out;
}

inline std::string truth_csv(const TruthExperiment& exp, std::uint64_t config_hash,
                             std::uint64_t seed) {
    std::string out = csv_comment(config_hash, seed, "montecarlo");
    out += "input,output,probability,counts,renormalized\n";
    for (int i = 0; i < 4; ++i)
        for (int o = 0; o < 4; ++o) {
            out += kOutcomeLabels[i];
            out += ',';
            out += kOutcomeLabels[o];
            out += ',';
            out += detail::fmt(exp.ideal[i][o]);
            out += ',';
            out += std::to_string(exp.cells[i][o].counts);
            out += ',';
            out += detail::fmt(exp.renormalized[i][o]);
            out += '\n';
        }
    return out;
}

inline std::string entangle_csv(double success_probability, const std::array<double, 4>& histogram,
                                double concurrence_value, const JointState& normalized_kept,
                                std::uint64_t config_hash, std::uint64_t seed) {
    std::string out = csv_comment(config_hash, seed, "ideal");
    out += "record,key,value\n";
    out += "metric,success_probability," + detail::fmt(success_probability) + '\n';
    out += "metric,concurrence," + detail::fmt(concurrence_value) + '\n';
    for (int o = 0; o < 4; ++o)
        out += std::string("histogram,") + kOutcomeLabels[o] + ',' + detail::fmt(histogram[o]) + '\n';
    out += "# post-selected state: record,port1,pol1,t1,port2,pol2,t2,re,im\n";
    for (const auto& [k, a] : normalized_kept.entries()) {
        const auto& [m1, m2] = k;
        out += "state,";
        out += std::to_string(m1.port);
        out += ',';
        out += to_char(m1.pol);
        out += ',';
        out += std::to_string(m1.t);
        out += ',';
        out += std::to_string(m2.port);
        out += ',';
        out += to_char(m2.pol);
        out += ',';
        out += std::to_string(m2.t);
        out += ',';
        out += detail::fmt(a.real(), "%.15g");
        out += ',';
        out += detail::fmt(a.imag(), "%.15g");
        out += '\n';
    }
    return out;
}

struct FringeRow {
    double volts = 0.0;
    double theta = 0.0;
    double probability = 0.0;
    std::int64_t counts = 0;
    double poisson_err = 0.0;
};

inline std::string fringe_csv(std::span<const FringeRow> rows, const std::optional<FringeFit>& fit,
                              const std::string& fit_note, std::uint64_t config_hash,
                              std::uint64_t seed, const std::string& mode) {
    std::string out = csv_comment(config_hash, seed, mode);
    if (fit) {
        out += "# fit_A=" + detail::fmt(fit->amplitude) + " fit_V=" + detail::fmt(fit->visibility) +
               " fit_phi=" + detail::fmt(fit->phase) + '\n';
    } else {
        out += "# fit=unavailable reason=" + fit_note + '\n';
    }
    out += "volts,theta_rad,probability,counts,poisson_err\n";
    for (const auto& r : rows) {
        out += detail::fmt(r.volts);
        out += ',';
        out += detail::fmt(r.theta);
        out += ',';
        out += detail::fmt(r.probability);
        out += ',';
        out += std::to_string(r.counts);
        out += ',';
        out += detail::fmt(r.poisson_err);
        out += '\n';
    }
    return out;
}

/// Dots for the samples plus the fitted curve when available. `use_counts`
/// selects the counts column (Monte Carlo runs) over the probability column.
inline std::string fringe_svg(std::span<const FringeRow> rows, const FringeFit* fit,
                              bool use_counts) {
    constexpr int width = 640, height = 400;
    constexpr double ml = 64, mr = 20, mt = 20, mb = 44;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double x_lo = 0.0, x_hi = 1.0, y_hi = 1.0;
    if (!rows.empty()) {
        x_lo = x_hi = rows.front().theta;
        y_hi = 0.0;
        for (const auto& r : rows) {
            x_lo = std::min(x_lo, r.theta);
            x_hi = std::max(x_hi, r.theta);
            y_hi = std::max(y_hi, use_counts ? static_cast<double>(r.counts) : r.probability);
        }
        if (x_hi == x_lo) x_hi = x_lo + 1.0;
        if (y_hi <= 0.0) y_hi = 1.0;
        y_hi *= 1.08;
    }
    const auto xpix = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto ypix = [&](double y) { return mt + plot_h - y / y_hi * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, mt + plot_h, ml + plot_w, mt + plot_h);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, mt, ml, mt + plot_h);
    svg += buf;
    for (int tick = 0; tick <= 4; ++tick) {
        const double xv = x_lo + (x_hi - x_lo) * tick / 4.0;
        const double yv = y_hi * tick / 4.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%s"
                      "</text>\n",
                      xpix(xv), mt + plot_h + 16.0, detail::fmt(xv, "%.3g").c_str());
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%s"
                      "</text>\n",
                      ml - 6.0, ypix(yv) + 4.0, detail::fmt(yv, "%.3g").c_str());
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">"
                  "theta_rad</text>\n",
                  ml + plot_w / 2.0, static_cast<double>(height - 8));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"14\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 14 %.1f)\">%s</text>\n",
                  mt + plot_h / 2.0, mt + plot_h / 2.0, use_counts ? "counts" : "probability");
    svg += buf;

    if (fit) {
        svg += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i <= 256; ++i) {
            const double theta = x_lo + (x_hi - x_lo) * i / 256.0;
            const double y =
                fit->amplitude * (1.0 + fit->visibility * std::cos(theta + fit->phase));
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", xpix(theta),
                          ypix(std::max(0.0, std::min(y, y_hi))));
            svg += buf;
        }
        svg += "\"/>\n";
    }
    for (const auto& r : rows) {
        const double y = use_counts ? static_cast<double>(r.counts) : r.probability;
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"#1f77b4\"/>\n", xpix(r.theta),
                      ypix(std::min(y, y_hi)));
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace franson
