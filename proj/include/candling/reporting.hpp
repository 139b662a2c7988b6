// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_REPORTING_HPP
#define CANDLING_REPORTING_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/image_io.hpp"
#include "candling/metrics.hpp"
#include "candling/trainer.hpp"

namespace candling::report {

/**
 * @brief File emitters for metric tables, cross-validation summaries, and
 * per-run accuracy/loss curves.
 *
 * Every plotted point also lands in a machine-readable sidecar; the images
 * are presentation only and never the source of truth. All text rendering
 * is a pure function of its inputs, so reruns produce identical bytes.
 */

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// Shortest decimal string that parses back to exactly the same double
/// (so 1.0 -> "1", 0.8 -> "0.8").
inline std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Fraction as a two-decimal percentage, e.g. 0.9803 -> "98.03%".
inline std::string format_percent(double fraction) {
    if (std::isnan(fraction)) return "NaN";
    std::array<char, 32> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.2f%%",
                                fraction * 100.0);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

inline std::string format_metric(const MetricValue& v) {
    return v.defined ? format_number(v.value) : "NaN";
}

// ---------------------------------------------------------------------------
// Metric tables
// ---------------------------------------------------------------------------

enum class Phase { training, testing };

inline std::string to_string(Phase p) {
    return p == Phase::training ? "training" : "testing";
}

inline Phase phase_from_string(const std::string& s) {
    if (s == "training") return Phase::training;
    if (s == "testing") return Phase::testing;
    throw DecodeError("unknown phase '" + s + "'");
}

struct TableRow {
    std::string model_name;
    Phase phase = Phase::training;
    MetricValue auc;
    MetricValue accuracy;
    MetricValue recall;
    MetricValue specificity;
    MetricValue precision;

    bool operator==(const TableRow&) const = default;
};

/// Lifts an evaluation report into a display row.
inline TableRow table_row(const std::string& model_name, Phase phase,
                          const MetricsReport& r) {
    TableRow row;
    row.model_name = model_name;
    row.phase = phase;
    row.auc = r.auc;
    row.accuracy = r.accuracy;
    row.recall = r.recall;
    row.specificity = r.specificity;
    row.precision = r.precision;
    return row;
}

enum class TableFormat { markdown, csv };

namespace detail {

inline std::string capitalized(const std::string& s) {
    std::string out = s;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z')
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

}  // namespace detail

/// Renders rows with the metric columns ordered AUC, Accuracy, Recall,
/// Specificity, Precision; undefined values print as "NaN".
inline std::string emit_table(const std::vector<TableRow>& rows,
                              TableFormat format) {
    if (rows.empty()) throw ConfigError("metric table needs at least one row");
    std::string out;
    if (format == TableFormat::markdown) {
        out += "| Model | Phase | AUC | Accuracy | Recall | Specificity | "
               "Precision |\n";
        out += "| --- | --- | --- | --- | --- | --- | --- |\n";
        for (const auto& r : rows) {
            out += "| " + r.model_name + " | " +
                   detail::capitalized(to_string(r.phase)) + " | " +
                   format_metric(r.auc) + " | " + format_metric(r.accuracy) +
                   " | " + format_metric(r.recall) + " | " +
                   format_metric(r.specificity) + " | " +
                   format_metric(r.precision) + " |\n";
        }
        return out;
    }
    out += "model,phase,auc,accuracy,recall,specificity,precision\n";
    for (const auto& r : rows) {
        out += r.model_name + "," + to_string(r.phase) + "," +
               format_metric(r.auc) + "," + format_metric(r.accuracy) + "," +
               format_metric(r.recall) + "," + format_metric(r.specificity) +
               "," + format_metric(r.precision) + "\n";
    }
    return out;
}

namespace detail {

inline MetricValue metric_from_cell(const std::string& cell) {
    if (cell == "NaN") return MetricValue::undefined();
    double v = 0.0;
    const auto res =
        std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw DecodeError("bad metric cell '" + cell + "'");
    return MetricValue::some(v);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace detail

/// Inverse of emit_table(rows, csv).
inline std::vector<TableRow> parse_table_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "model,phase,auc,accuracy,recall,specificity,precision")
        throw DecodeError("metric csv header mismatch");
    std::vector<TableRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != 7)
            throw DecodeError("metric csv row needs 7 cells, got " +
                              std::to_string(cells.size()));
        TableRow r;
        r.model_name = cells[0];
        r.phase = phase_from_string(cells[1]);
        r.auc = detail::metric_from_cell(cells[2]);
        r.accuracy = detail::metric_from_cell(cells[3]);
        r.recall = detail::metric_from_cell(cells[4]);
        r.specificity = detail::metric_from_cell(cells[5]);
        r.precision = detail::metric_from_cell(cells[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Cross-validation summary
// ---------------------------------------------------------------------------

/// Per-fold accuracies plus mean/std, percentages to two decimals.
inline std::string emit_crossval_summary(const train::CrossValReport& r) {
    std::string out = "cross-validation: " + r.backbone + " (k=" +
                      std::to_string(r.k) + ")\n";
    for (std::size_t i = 0; i < r.fold_val_accuracies.size(); ++i) {
        out += "fold " + std::to_string(i) + ": " +
               format_percent(r.fold_val_accuracies[i]);
        if (i < r.runs.size() && r.runs[i].diverged) out += " (diverged)";
        out += "\n";
    }
    out += "mean " + format_percent(r.mean_accuracy) + "\n";
    out += "std " + format_percent(r.std_accuracy) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

struct CurvePoint {
    int epoch = 0;
    double value = 0.0;
};

struct CurveSeries {
    std::string name;  // train_accuracy | val_accuracy | train_loss | val_loss
    std::vector<CurvePoint> points;
};

/// Extracts the four plotted series from a run, checking the curve
/// invariants (strictly increasing epochs, finite values).
inline std::vector<CurveSeries> make_curves(const train::TrainingRun& run) {
    if (run.history.empty())
        throw ConfigError("curves need a nonempty history");
    std::vector<CurveSeries> series{{"train_accuracy", {}},
                                    {"val_accuracy", {}},
                                    {"train_loss", {}},
                                    {"val_loss", {}}};
    int prev_epoch = 0;
    for (const auto& rec : run.history) {
        if (rec.epoch <= prev_epoch)
            throw ConfigError("history epochs must increase strictly");
        prev_epoch = rec.epoch;
        const std::array<double, 4> values{rec.train_accuracy,
                                           rec.val_accuracy, rec.train_loss,
                                           rec.val_loss};
        for (std::size_t s = 0; s < 4; ++s) {
            if (!std::isfinite(values[s]))
                throw ConfigError("curve values must be finite");
            series[s].points.push_back({rec.epoch, values[s]});
        }
    }
    return series;
}

namespace detail {

// --- tiny 5x7 bitmap font (lowercase letters, digits, and punctuation) ---

struct Glyph {
    char c;
    std::array<std::uint8_t, 7> rows;  // low 5 bits, MSB = leftmost column
};

inline const std::array<std::uint8_t, 7>* find_glyph(char c) {
    static const Glyph table[] = {
        {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
        {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
        {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
        {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
        {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
        {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
        {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
        {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
        {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
        {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
        {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
        {'b', {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x1E}},
        {'c', {0x00, 0x00, 0x0E, 0x11, 0x10, 0x11, 0x0E}},
        {'d', {0x01, 0x01, 0x0F, 0x11, 0x11, 0x11, 0x0F}},
        {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
        {'f', {0x06, 0x09, 0x08, 0x1C, 0x08, 0x08, 0x08}},
        {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
        {'h', {0x10, 0x10, 0x1E, 0x11, 0x11, 0x11, 0x11}},
        {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}},
        {'j', {0x02, 0x00, 0x06, 0x02, 0x02, 0x12, 0x0C}},
        {'k', {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12}},
        {'l', {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
        {'m', {0x00, 0x00, 0x1A, 0x15, 0x15, 0x15, 0x15}},
        {'n', {0x00, 0x00, 0x1E, 0x11, 0x11, 0x11, 0x11}},
        {'o', {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E}},
        {'p', {0x00, 0x00, 0x1E, 0x11, 0x1E, 0x10, 0x10}},
        {'q', {0x00, 0x00, 0x0F, 0x11, 0x0F, 0x01, 0x01}},
        {'r', {0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10}},
        {'s', {0x00, 0x00, 0x0F, 0x10, 0x0E, 0x01, 0x1E}},
        {'t', {0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06}},
        {'u', {0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D}},
        {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
        {'w', {0x00, 0x00, 0x11, 0x15, 0x15, 0x15, 0x0A}},
        {'x', {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11}},
        {'y', {0x00, 0x00, 0x11, 0x11, 0x0F, 0x01, 0x0E}},
        {'z', {0x00, 0x00, 0x1F, 0x02, 0x04, 0x08, 0x1F}},
        {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
        {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
        {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
        {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
        {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    };
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    for (const auto& g : table)
        if (g.c == c) return &g.rows;
    return nullptr;
}

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

inline void put_px(Image& img, int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    img.at(y, x, 0) = c.r;
    img.at(y, x, 1) = c.g;
    img.at(y, x, 2) = c.b;
}

inline void fill_rect(Image& img, int x, int y, int w, int h, Rgb c) {
    for (int yy = y; yy < y + h; ++yy)
        for (int xx = x; xx < x + w; ++xx) put_px(img, xx, yy, c);
}

inline void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb c,
                      int thickness = 1) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
        fill_rect(img, x, y, thickness, thickness, c);
        if (x == x1 && y == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

inline void draw_text(Image& img, int x, int y, const std::string& text,
                      Rgb c, int scale = 1) {
    int cx = x;
    for (char ch : text) {
        if (const auto* rows = find_glyph(ch)) {
            for (int ry = 0; ry < 7; ++ry)
                for (int rx = 0; rx < 5; ++rx)
                    if ((*rows)[ry] & (1 << (4 - rx)))
                        fill_rect(img, cx + rx * scale, y + ry * scale,
                                  scale, scale, c);
        }
        cx += 6 * scale;  // 5px glyph + 1px gap
    }
}

/// Concise tick label: trims trailing zeros of a fixed 3-decimal render.
inline std::string tick_label(double v) {
    std::array<char, 32> buf{};
    int n = std::snprintf(buf.data(), buf.size(), "%.3f", v);
    std::string s(buf.data(), static_cast<std::size_t>(n));
    while (s.find('.') != std::string::npos &&
           (s.back() == '0' || s.back() == '.')) {
        const bool dot = s.back() == '.';
        s.pop_back();
        if (dot) break;
    }
    if (s == "-0") s = "0";
    return s;
}

struct PanelRange {
    double lo = 0.0;
    double hi = 1.0;
};

inline PanelRange panel_range(const CurveSeries& a, const CurveSeries& b) {
    PanelRange r{std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity()};
    for (const auto* s : {&a, &b})
        for (const auto& p : s->points) {
            r.lo = std::min(r.lo, p.value);
            r.hi = std::max(r.hi, p.value);
        }
    if (r.lo == r.hi) {
        r.lo -= 0.5;
        r.hi += 0.5;
    } else {
        const double pad = 0.05 * (r.hi - r.lo);
        r.lo -= pad;
        r.hi += pad;
    }
    return r;
}

constexpr int kPlotW = 880;
constexpr int kPlotH = 600;
constexpr int kMarginL = 64;
constexpr int kMarginR = 16;
constexpr int kMarginT = 28;
constexpr int kMarginB = 36;
constexpr int kPanelGap = 46;

constexpr Rgb kAxis{60, 60, 60};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kText{40, 40, 40};
constexpr Rgb kTrainColor{31, 119, 180};
constexpr Rgb kValColor{214, 96, 36};

struct Panel {
    int x0, y0, w, h;
    PanelRange range;
    int epochs_lo, epochs_hi;

    int px(double epoch) const {
        if (epochs_hi == epochs_lo) return x0 + w / 2;
        return x0 + static_cast<int>(std::lround(
                        (epoch - epochs_lo) / double(epochs_hi - epochs_lo) *
                        (w - 1)));
    }
    int py(double v) const {
        return y0 + h - 1 -
               static_cast<int>(std::lround((v - range.lo) /
                                            (range.hi - range.lo) * (h - 1)));
    }
};

inline void draw_panel(Image& img, const Panel& p, const std::string& caption,
                       const CurveSeries& train_s, const CurveSeries& val_s) {
    // Horizontal gridlines + y tick labels at 5 stops.
    for (int t = 0; t < 5; ++t) {
        const double v = p.range.lo + (p.range.hi - p.range.lo) * t / 4.0;
        const int y = p.py(v);
        draw_line(img, p.x0, y, p.x0 + p.w - 1, y, kGrid);
        const std::string label = tick_label(v);
        draw_text(img, p.x0 - 6 * static_cast<int>(label.size()) - 6, y - 3,
                  label, kText);
    }
    // X ticks at up to 10 integer epochs.
    const int span = p.epochs_hi - p.epochs_lo;
    const int step = std::max(1, (span + 9) / 10);
    for (int e = p.epochs_lo; e <= p.epochs_hi; e += step) {
        const int x = p.px(e);
        draw_line(img, x, p.y0, x, p.y0 + p.h - 1, kGrid);
        const std::string label = std::to_string(e);
        draw_text(img, x - 3 * static_cast<int>(label.size()),
                  p.y0 + p.h + 4, label, kText);
    }
    // Frame.
    draw_line(img, p.x0, p.y0, p.x0 + p.w - 1, p.y0, kAxis);
    draw_line(img, p.x0, p.y0 + p.h - 1, p.x0 + p.w - 1, p.y0 + p.h - 1,
              kAxis);
    draw_line(img, p.x0, p.y0, p.x0, p.y0 + p.h - 1, kAxis);
    draw_line(img, p.x0 + p.w - 1, p.y0, p.x0 + p.w - 1, p.y0 + p.h - 1,
              kAxis);
    // Series.
    for (const auto& [series, color] :
         {std::pair{&train_s, kTrainColor}, std::pair{&val_s, kValColor}}) {
        for (std::size_t i = 0; i + 1 < series->points.size(); ++i) {
            const auto& a = series->points[i];
            const auto& b = series->points[i + 1];
            draw_line(img, p.px(a.epoch), p.py(a.value), p.px(b.epoch),
                      p.py(b.value), color, 2);
        }
        for (const auto& pt : series->points)
            fill_rect(img, p.px(pt.epoch) - 1, p.py(pt.value) - 1, 3, 3,
                      color);
    }
    draw_text(img, p.x0 + 6, p.y0 + 5, caption, kText);
    // Legend swatches, top right.
    const int lx = p.x0 + p.w - 92, ly = p.y0 + 6;
    fill_rect(img, lx, ly + 2, 12, 3, kTrainColor);
    draw_text(img, lx + 16, ly, "train", kText);
    fill_rect(img, lx, ly + 13, 12, 3, kValColor);
    draw_text(img, lx + 16, ly + 11, "val", kText);
}

inline Image render_curves_png(const train::TrainingRun& run,
                               const std::vector<CurveSeries>& series) {
    Image img(kPlotH, kPlotW, 3, 255);
    const int epochs_lo = series[0].points.front().epoch;
    const int epochs_hi = series[0].points.back().epoch;
    const int panel_h = (kPlotH - kMarginT - kMarginB - kPanelGap) / 2;
    const int panel_w = kPlotW - kMarginL - kMarginR;

    std::string title = run.backbone;
    if (run.fold_index >= 0)
        title += " fold " + std::to_string(run.fold_index);
    draw_text(img, kMarginL, 8, title, kText, 2);

    Panel acc{kMarginL, kMarginT + 14, panel_w, panel_h,
              panel_range(series[0], series[1]), epochs_lo, epochs_hi};
    Panel loss{kMarginL, kMarginT + 14 + panel_h + kPanelGap, panel_w,
               panel_h, panel_range(series[2], series[3]), epochs_lo,
               epochs_hi};
    draw_panel(img, acc, "accuracy", series[0], series[1]);
    draw_panel(img, loss, "loss", series[2], series[3]);
    draw_text(img, kMarginL + panel_w / 2 - 15, kPlotH - 10, "epoch", kText);
    return img;
}

inline std::string render_curves_svg(const train::TrainingRun& run,
                                     const std::vector<CurveSeries>& series) {
    const int epochs_lo = series[0].points.front().epoch;
    const int epochs_hi = series[0].points.back().epoch;
    const int panel_h = (kPlotH - kMarginT - kMarginB - kPanelGap) / 2;
    const int panel_w = kPlotW - kMarginL - kMarginR;
    Panel panels[2] = {
        {kMarginL, kMarginT + 14, panel_w, panel_h,
         panel_range(series[0], series[1]), epochs_lo, epochs_hi},
        {kMarginL, kMarginT + 14 + panel_h + kPanelGap, panel_w, panel_h,
         panel_range(series[2], series[3]), epochs_lo, epochs_hi}};
    const char* captions[2] = {"accuracy", "loss"};
    const char* colors[2] = {"#1f77b4", "#d66024"};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kPlotW) + "\" height=\"" + std::to_string(kPlotH) +
         "\" viewBox=\"0 0 " + std::to_string(kPlotW) + " " +
         std::to_string(kPlotH) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::string title = run.backbone;
    if (run.fold_index >= 0)
        title += " fold " + std::to_string(run.fold_index);
    s += "<text x=\"" + std::to_string(kMarginL) +
         "\" y=\"22\" font-family=\"monospace\" font-size=\"16\">" + title +
         "</text>\n";
    for (int pi = 0; pi < 2; ++pi) {
        const Panel& p = panels[pi];
        for (int t = 0; t < 5; ++t) {
            const double v =
                p.range.lo + (p.range.hi - p.range.lo) * t / 4.0;
            const int y = p.py(v);
            s += "<line x1=\"" + std::to_string(p.x0) + "\" y1=\"" +
                 std::to_string(y) + "\" x2=\"" +
                 std::to_string(p.x0 + p.w - 1) + "\" y2=\"" +
                 std::to_string(y) + "\" stroke=\"#e1e1e1\"/>\n";
            s += "<text x=\"" + std::to_string(p.x0 - 8) + "\" y=\"" +
                 std::to_string(y + 4) +
                 "\" text-anchor=\"end\" font-family=\"monospace\" "
                 "font-size=\"11\">" +
                 tick_label(v) + "</text>\n";
        }
        s += "<rect x=\"" + std::to_string(p.x0) + "\" y=\"" +
             std::to_string(p.y0) + "\" width=\"" + std::to_string(p.w - 1) +
             "\" height=\"" + std::to_string(p.h - 1) +
             "\" fill=\"none\" stroke=\"#3c3c3c\"/>\n";
        for (int si = 0; si < 2; ++si) {
            const auto& ser = series[2 * pi + si];
            s += "<polyline fill=\"none\" stroke=\"";
            s += si == 0 ? colors[0] : colors[1];
            s += "\" stroke-width=\"2\" points=\"";
            for (const auto& pt : ser.points) {
                s += std::to_string(p.px(pt.epoch)) + "," +
                     std::to_string(p.py(pt.value)) + " ";
            }
            s += "\"/>\n";
        }
        s += "<text x=\"" + std::to_string(p.x0 + 6) + "\" y=\"" +
             std::to_string(p.y0 + 14) +
             "\" font-family=\"monospace\" font-size=\"12\">" +
             std::string(captions[pi]) + "</text>\n";
    }
    const int span = panels[0].epochs_hi - panels[0].epochs_lo;
    const int step = std::max(1, (span + 9) / 10);
    for (int e = epochs_lo; e <= epochs_hi; e += step) {
        const int x = panels[1].px(e);
        s += "<text x=\"" + std::to_string(x) + "\" y=\"" +
             std::to_string(panels[1].y0 + panels[1].h + 14) +
             "\" text-anchor=\"middle\" font-family=\"monospace\" "
             "font-size=\"11\">" +
             std::to_string(e) + "</text>\n";
    }
    s += "<text x=\"" + std::to_string(kMarginL + panel_w / 2) + "\" y=\"" +
         std::to_string(kPlotH - 8) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"12\">epoch</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace detail

struct CurveArtifacts {
    std::filesystem::path png;
    std::filesystem::path svg;
    std::filesystem::path sidecar;
};

inline void write_curves_jsonl(const std::filesystem::path& path,
                               const std::vector<CurveSeries>& series) {
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write sidecar: " + path.string());
    for (const auto& s : series) {
        nlohmann::ordered_json j;
        j["name"] = s.name;
        auto& pts = j["points"] = nlohmann::ordered_json::array();
        for (const auto& p : s.points) {
            nlohmann::ordered_json pj;
            pj["epoch"] = p.epoch;
            pj["value"] = p.value;
            pts.push_back(std::move(pj));
        }
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("cannot write sidecar: " + path.string());
}

inline std::vector<CurveSeries> read_curves_jsonl(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("sidecar not found: " +
                                        path.string());
    std::vector<CurveSeries> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DecodeError("bad sidecar line in " + path.string());
        CurveSeries s;
        s.name = j.at("name").get<std::string>();
        for (const auto& pj : j.at("points"))
            s.points.push_back({pj.at("epoch").get<int>(),
                                pj.at("value").get<double>()});
        out.push_back(std::move(s));
    }
    return out;
}

/**
 * @brief Writes the per-run curve plot as png + svg plus the exact plotted
 * points as a jsonl sidecar. Files land in out_dir following the
 * curves_<backbone>[_fold<i>] naming scheme.
 */
inline CurveArtifacts emit_curves(const train::TrainingRun& run,
                                  const std::filesystem::path& out_dir) {
    const auto series = make_curves(run);
    std::string base = "curves_" + run.backbone;
    if (run.fold_index >= 0)
        base += "_fold" + std::to_string(run.fold_index);

    CurveArtifacts files;
    files.png = out_dir / (base + ".png");
    files.svg = out_dir / (base + ".svg");
    files.sidecar = out_dir / (base + ".jsonl");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    write_image(files.png, detail::render_curves_png(run, series));
    {
        std::ofstream out(files.svg, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write plot: " + files.svg.string());
        out << detail::render_curves_svg(run, series);
        if (!out) throw IoError("cannot write plot: " + files.svg.string());
    }
    write_curves_jsonl(files.sidecar, series);
    return files;
}

}  // namespace candling::report

#endif  // CANDLING_REPORTING_HPP
