#include "vj/cascade.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

std::size_t Cascade::total_weak() const {
    std::size_t n = 0;
    for (const Stage& s : stages) n += s.weak.size();
    return n;
}

namespace {

struct LineLexer {
    const std::string& text;
    std::size_t pos = 0;
    long line = 0;

    explicit LineLexer(const std::string& t) : text(t) {}

    // Next non-empty line split into whitespace tokens; empty vector at EOF.
    std::vector<std::string> next_line() {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            ++line;
            std::vector<std::string> toks;
            std::size_t i = pos;
            while (i < end) {
                while (i < end && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
                std::size_t j = i;
                while (j < end && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
                if (j > i) toks.emplace_back(text.substr(i, j - i));
                i = j;
            }
            pos = end + 1;
            if (!toks.empty()) return toks;
        }
        return {};
    }
};

std::int64_t parse_int(const std::string& tok, long line, std::int64_t lo, std::int64_t hi,
                       const char* what) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc::result_out_of_range)
        throw ParseError(std::string("numeric overflow in ") + what + " '" + tok + "'", line);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(std::string("bad ") + what + " '" + tok + "'", line);
    if (v < lo || v > hi)
        throw ParseError(std::string(what) + " " + tok + " out of range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]",
                         line);
    return v;
}

constexpr std::int64_t kI32Min = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kI32Max = std::numeric_limits<std::int32_t>::max();

void check_rect(const WeightedRect& wr, int win_w, int win_h, long line) {
    const Rect& r = wr.rect;
    if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > win_w || r.y + r.h > win_h)
        throw ParseError("feature rectangle (" + std::to_string(r.x) + "," +
                             std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                             std::to_string(r.h) + ") outside " + std::to_string(win_w) +
                             "x" + std::to_string(win_h) + " window",
                         line);
}

} // namespace

Cascade parse_cascade(const std::string& text) {
    LineLexer lex(text);

    auto header = lex.next_line();
    if (header.empty()) throw ParseError("empty cascade file", 1);
    if (header[0] != "VJC1")
        throw ParseError("bad magic '" + header[0] + "' (want VJC1)", lex.line);
    if (header.size() != 4)
        throw ParseError("header needs 4 tokens: VJC1 <stages> <win_w> <win_h>", lex.line);

    Cascade c;
    const auto n_stages = parse_int(header[1], lex.line, 1, 1 << 16, "stage count");
    c.window_w = static_cast<int>(parse_int(header[2], lex.line, 1, 1 << 14, "window width"));
    c.window_h = static_cast<int>(parse_int(header[3], lex.line, 1, 1 << 14, "window height"));

    for (std::int64_t si = 0; si < n_stages; ++si) {
        auto stage_line = lex.next_line();
        if (stage_line.empty())
            throw ParseError("unexpected end of file: expected STAGE " + std::to_string(si + 1) +
                                 " of " + std::to_string(n_stages),
                             lex.line);
        if (stage_line[0] != "STAGE" || stage_line.size() != 3)
            throw ParseError("expected 'STAGE <n_weak> <threshold>'", lex.line);
        const auto n_weak = parse_int(stage_line[1], lex.line, 1, 1 << 20, "weak count");
        Stage stage;
        stage.threshold = static_cast<std::int32_t>(
            parse_int(stage_line[2], lex.line, kI32Min, kI32Max, "stage threshold"));

        for (std::int64_t wi = 0; wi < n_weak; ++wi) {
            auto toks = lex.next_line();
            if (toks.empty())
                throw ParseError("unexpected end of file inside stage " + std::to_string(si + 1),
                                 lex.line);
            if (toks.size() != 18)
                throw ParseError("weak classifier needs 18 numbers, got " +
                                     std::to_string(toks.size()),
                                 lex.line);
            WeakClassifier wc;
            int count = 0;
            for (int ri = 0; ri < 3; ++ri) {
                WeightedRect wr;
                wr.rect.x = static_cast<int>(
                    parse_int(toks[ri * 5 + 0], lex.line, 0, 1 << 14, "rect x"));
                wr.rect.y = static_cast<int>(
                    parse_int(toks[ri * 5 + 1], lex.line, 0, 1 << 14, "rect y"));
                wr.rect.w = static_cast<int>(
                    parse_int(toks[ri * 5 + 2], lex.line, 0, 1 << 14, "rect w"));
                wr.rect.h = static_cast<int>(
                    parse_int(toks[ri * 5 + 3], lex.line, 0, 1 << 14, "rect h"));
                wr.weight = static_cast<int>(
                    parse_int(toks[ri * 5 + 4], lex.line, -(1 << 20), 1 << 20, "rect weight"));
                const bool null_slot = wr.rect.x == 0 && wr.rect.y == 0 && wr.rect.w == 0 &&
                                       wr.rect.h == 0 && wr.weight == 0;
                if (null_slot) {
                    if (ri < 2)
                        throw ParseError("slots 1 and 2 of a feature must be non-null", lex.line);
                } else {
                    check_rect(wr, c.window_w, c.window_h, lex.line);
                    if (ri == 2 && count < 2)
                        throw ParseError("third rect set but second is null", lex.line);
                    wc.feature.rects[count++] = wr;
                }
            }
            wc.feature.rect_count = count;
            wc.threshold = static_cast<std::int32_t>(
                parse_int(toks[15], lex.line, kI32Min, kI32Max, "weak threshold"));
            wc.left_val = static_cast<std::int32_t>(
                parse_int(toks[16], lex.line, kI32Min, kI32Max, "left value"));
            wc.right_val = static_cast<std::int32_t>(
                parse_int(toks[17], lex.line, kI32Min, kI32Max, "right value"));
            stage.weak.push_back(wc);
        }
        c.stages.push_back(std::move(stage));
    }
    if (!lex.next_line().empty())
        throw ParseError("trailing content after last stage", lex.line);
    return c;
}

Cascade load_cascade(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_cascade(ss.str());
    } catch (ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_cascade(const Cascade& c) {
    std::ostringstream out;
    out << "VJC1 " << c.stages.size() << " " << c.window_w << " " << c.window_h << "\n";
    for (const Stage& s : c.stages) {
        out << "STAGE " << s.weak.size() << " " << s.threshold << "\n";
        for (const WeakClassifier& wc : s.weak) {
            for (int ri = 0; ri < 3; ++ri) {
                if (ri < wc.feature.rect_count) {
                    const WeightedRect& wr = wc.feature.rects[ri];
                    out << wr.rect.x << " " << wr.rect.y << " " << wr.rect.w << " "
                        << wr.rect.h << " " << wr.weight << " ";
                } else {
                    out << "0 0 0 0 0 ";
                }
            }
            out << wc.threshold << " " << wc.left_val << " " << wc.right_val << "\n";
        }
    }
    return out.str();
}

void save_cascade(const Cascade& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << serialize_cascade(c);
    if (!out) throw IoError("short write to '" + path + "'");
}

std::vector<std::string> lint_cascade(const Cascade& c) {
    std::vector<std::string> warnings;
    for (std::size_t i = 1; i < c.stages.size(); ++i) {
        if (c.stages[i].weak.size() < c.stages[i - 1].weak.size()) {
            warnings.push_back("stage " + std::to_string(i + 1) + " has fewer weak classifiers (" +
                               std::to_string(c.stages[i].weak.size()) + ") than stage " +
                               std::to_string(i) + " (" +
                               std::to_string(c.stages[i - 1].weak.size()) +
                               "); trained cascades usually grow");
        }
    }
    return warnings;
}

std::int64_t eval_feature(const HaarFeature& f, const IntegralPair& ip, int ox, int oy) {
    std::int64_t sum = 0;
    for (int i = 0; i < f.rect_count; ++i) {
        const WeightedRect& wr = f.rects[i];
        Rect r = wr.rect;
        r.x += ox;
        r.y += oy;
        sum += static_cast<std::int64_t>(wr.weight) *
               static_cast<std::int64_t>(rect_sum(ip, r, false));
    }
    return sum;
}

std::int64_t eval_weak(const WeakClassifier& wc, const IntegralPair& ip, int ox, int oy,
                       std::uint64_t sigma_n) {
    const std::int64_t feature = eval_feature(wc.feature, ip, ox, oy);
    // Both sides in 2^12 fixed point: the raw sum is scaled up, the stored
    // threshold (per-sigmaN units) is scaled by the window's sigma*N.
    const std::int64_t lhs = feature << kFixedShift;
    const std::int64_t rhs = static_cast<std::int64_t>(wc.threshold) *
                             static_cast<std::int64_t>(sigma_n);
    return lhs < rhs ? wc.left_val : wc.right_val;
}

StageResult eval_stage(const Stage& s, const IntegralPair& ip, int ox, int oy,
                       std::uint64_t sigma_n) {
    StageResult r;
    for (const WeakClassifier& wc : s.weak) r.stage_sum += eval_weak(wc, ip, ox, oy, sigma_n);
    r.passed = r.stage_sum >= s.threshold;
    return r;
}

bool run_cascade(const Cascade& c, const IntegralPair& ip, int ox, int oy,
                 EvalCounters* counters) {
    if (ox < 0 || oy < 0 || ox + c.window_w > ip.width || oy + c.window_h > ip.height)
        throw BoundsError("run_cascade: window at (" + std::to_string(ox) + "," +
                          std::to_string(oy) + ") outside image");
    const std::uint64_t sigma_n = window_stddev(ip, ox, oy, c.window_w, c.window_h);
    if (counters) ++counters->windows;
    for (const Stage& s : c.stages) {
        if (counters) {
            ++counters->stage_evals;
            counters->weak_evals += s.weak.size();
        }
        if (!eval_stage(s, ip, ox, oy, sigma_n).passed) return false;
    }
    return true;
}

} // namespace vj
