#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "hypslit/dynamics.hpp"

namespace hypslit {

// ------------------------------------------------------------- domain specs

enum class DomainKind { Slits, Oscillating, Parabolic };

struct DomainSpec {
    DomainKind kind = DomainKind::Slits;
    std::vector<DownwardSlit> slits;
    CombBuildParams params;
};

inline std::vector<DownwardSlit> parse_slit_list(const std::string& s) {
    static const std::regex pair(R"(\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\))");
    std::vector<DownwardSlit> out;
    std::string rest;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), pair); it != std::sregex_iterator(); ++it) {
        rest += s.substr(last, it->position() - last);
        last = it->position() + it->length();
        out.push_back({parse_number("slit x", (*it)[1]), parse_number("slit top", (*it)[2])});
    }
    rest += s.substr(last);
    for (char c : rest)
        if (!(c == '[' || c == ']' || c == ',' || std::isspace(static_cast<unsigned char>(c))))
            throw Error(ErrorKind::ConfigError, "cannot parse slit list '" + s + "'");
    if (out.empty()) throw Error(ErrorKind::DomainInvalid, "empty slit list");
    return out;
}

inline DomainSpec parse_domain_spec(const std::string& text) {
    const auto kv = parse_key_values(text);
    DomainSpec d;
    auto num = [&](const char* k, double& field) {
        if (auto it = kv.find(k); it != kv.end()) field = parse_number(k, it->second);
    };
    if (auto it = kv.find("slits"); it != kv.end()) {
        if (kv.count("constructor")) throw Error(ErrorKind::ConfigError, "give either slits or constructor, not both");
        d.slits = parse_slit_list(it->second);
        return d;
    }
    auto it = kv.find("constructor");
    if (it == kv.end()) throw Error(ErrorKind::ConfigError, "domain spec needs 'slits' or 'constructor'");
    if (it->second == "oscillating") d.kind = DomainKind::Oscillating;
    else if (it->second == "parabolic") d.kind = DomainKind::Parabolic;
    else throw Error(ErrorKind::ConfigError, "unknown constructor '" + it->second + "'");
    double teeth = d.params.teeth;
    num("teeth", teeth);
    if (teeth != std::floor(teeth) || teeth < 1) throw Error(ErrorKind::ConfigError, "teeth must be a positive integer");
    d.params.teeth = static_cast<int>(teeth);
    num("c", d.params.c);
    num("E_fraction", d.params.E_fraction);
    num("delta", d.params.delta);
    num("N0", d.params.N0);
    num("alpha0", d.params.alpha0);
    num("alpha1", d.params.alpha1);
    num("alpha", d.params.alpha);
    num("beta", d.params.beta);
    num("R0", d.params.R0);
    num("bGrowthSlack", d.params.bGrowthSlack);
    num("t1Margin", d.params.t1Margin);
    return d;
}

struct BuiltDomain {
    SlitDomain omega;
    std::optional<ConstantsLedger> ledger;  // top-level ledger for bounds and boxes
    std::optional<OscillatingReport> oscillating;
    std::optional<ParabolicReport> parabolic;
};

/// Builds the domain; comb constructors calibrate a ledger unless one is given.
inline BuiltDomain build_domain(const DomainSpec& d, std::optional<ConstantsLedger> ledger, std::uint64_t seed) {
    if (d.kind == DomainKind::Slits) return {SlitDomain(d.slits), ledger, std::nullopt, std::nullopt};
    if (!ledger) {
        LedgerOptions opt;
        opt.seed = seed;
        ledger = build_ledger(d.params.c, d.params.E_fraction, d.params.delta, d.params.N0, opt);
    }
    if (d.kind == DomainKind::Oscillating) {
        OscillatingComb c = build_oscillating_comb(d.params, *ledger);
        return {c.omega, c.ledger, c.report, std::nullopt};
    }
    const auto levels = parabolic_level_ledgers(*ledger, d.params.teeth);
    ParabolicComb c = build_parabolic_comb(d.params, levels);
    return {c.omega, levels.back(), std::nullopt, c.report};
}

// --------------------------------------------------------------- reports

enum class Provenance { Exact, CertifiedLo, CertifiedHi, Measured };

inline const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::CertifiedLo: return "certified-lo";
    case Provenance::CertifiedHi: return "certified-hi";
    case Provenance::Measured: return "measured";
    }
    return "measured";
}

/// CSV with a fixed header; every numeric cell is followed by its provenance.
class CsvTable {
public:
    struct Column {
        std::string name;
        bool numeric;
    };

    explicit CsvTable(std::vector<Column> cols) : cols_(std::move(cols)) {}

    CsvTable& row() {
        rows_.emplace_back();
        return *this;
    }
    CsvTable& num(double v, Provenance p) {
        rows_.back().push_back(format_double(v));
        rows_.back().push_back(to_string(p));
        return *this;
    }
    CsvTable& text(const std::string& s) {
        rows_.back().push_back(escape(s));
        return *this;
    }

    std::string str() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < cols_.size(); ++i) {
            if (i) os << ',';
            os << cols_[i].name;
            if (cols_[i].numeric) os << ',' << cols_[i].name << "_src";
        }
        os << '\n';
        std::size_t width = 0;
        for (const auto& c : cols_) width += c.numeric ? 2 : 1;
        for (const auto& r : rows_) {
            if (r.size() != width) throw Error(ErrorKind::ConfigError, "csv row width mismatch");
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        return os.str();
    }

private:
    static std::string escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string o = "\"";
        for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
        return o + "\"";
    }

    std::vector<Column> cols_;
    std::vector<std::vector<std::string>> rows_;
};

/// Minimal SVG: slits as vertical lines, boxes as rectangles, curves as polylines.
class SvgScene {
public:
    explicit SvgScene(Rect view) : view_(view) {}

    void slits(const SlitDomain& omega) {
        for (const auto& s : omega.slits()) {
            const double y0 = std::max(view_.y0, std::min(s.top, view_.y1));
            line(Point(s.x, view_.y0), Point(s.x, y0), "black");
        }
    }
    void rect(const Rect& r, const std::string& colour) {
        std::ostringstream os;
        os << "<rect x=\"" << format_double(r.x0) << "\" y=\"" << format_double(flip(r.y1)) << "\" width=\"" << format_double(r.width())
           << "\" height=\"" << format_double(r.height()) << "\" fill=\"none\" stroke=\"" << colour << "\"/>\n";
        body_ += os.str();
    }
    void polyline(const std::vector<Point>& pts, const std::string& colour) {
        std::ostringstream os;
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << format_double(pts[i].real()) << ',' << format_double(flip(pts[i].imag()));
        os << "\"/>\n";
        body_ += os.str();
    }
    void line(Point a, Point b, const std::string& colour) { polyline({a, b}, colour); }

    std::string str() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(view_.x0) << ' ' << format_double(flip(view_.y1)) << ' '
           << format_double(view_.width()) << ' ' << format_double(view_.height()) << "\" preserveAspectRatio=\"none\">\n"
           << body_ << "</svg>\n";
        return os.str();
    }

private:
    double flip(double y) const { return view_.y0 + view_.y1 - y; }
    Rect view_;
    std::string body_;
};

// -------------------------------------------------------------- file output

inline std::filesystem::path output_dir(const std::string& flag) {
    std::filesystem::path p = flag;
    if (p.empty()) {
        const char* env = std::getenv("HYPSLIT_OUTPUT_DIR");
        p = env && *env ? env : ".";
    }
    std::filesystem::create_directories(p);
    return p;
}

/// Write to a sibling temp file, then rename over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + tmp);
        f << content;
        if (!f.flush()) throw Error(ErrorKind::ConfigError, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// ------------------------------------------------------------ report tables

inline std::string bounds_csv(const std::vector<std::pair<Point, Point>>& pairs, const std::vector<BoundPair>& b) {
    CsvTable t({{"zx", true}, {"zy", true}, {"wx", true}, {"wy", true}, {"lo", true}, {"hi", true}, {"lo_method", false}, {"hi_method", false}});
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const bool exact = b[i].lo == b[i].hi && b[i].hiMethod == "exact";
        t.row()
            .num(pairs[i].first.real(), Provenance::Exact)
            .num(pairs[i].first.imag(), Provenance::Exact)
            .num(pairs[i].second.real(), Provenance::Exact)
            .num(pairs[i].second.imag(), Provenance::Exact)
            .num(b[i].lo, exact ? Provenance::Exact : Provenance::CertifiedLo)
            .num(b[i].hi, exact ? Provenance::Exact : Provenance::CertifiedHi)
            .text(b[i].loMethod)
            .text(b[i].hiMethod);
    }
    return t.str();
}

inline std::string curve_csv(const Curve& c) {
    CsvTable t({{"s", true}, {"x", true}, {"y", true}});
    for (std::size_t i = 0; i < c.size(); ++i)
        t.row().num(c.params[i], Provenance::Measured).num(c.points[i].real(), Provenance::Measured).num(c.points[i].imag(), Provenance::Measured);
    return t.str();
}

inline std::string boxes_csv(const std::vector<GoodBox>& boxes) {
    CsvTable t({{"id", false}, {"a", true}, {"R", true}, {"M", true}, {"b", true}, {"bottom", true}, {"top", true}, {"open_bottom", false}});
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& B = boxes[i];
        t.row()
            .text(std::to_string(i))
            .num(B.a, Provenance::Exact)
            .num(B.R, Provenance::Exact)
            .num(B.M, Provenance::Exact)
            .num(B.b, Provenance::Exact)
            .num(B.reported_bottom(), Provenance::Exact)
            .num(B.top(), Provenance::Exact)
            .text(B.open_bottom() ? "yes" : "no");
    }
    return t.str();
}

inline std::string slope_csv(const SlopeReport& r) {
    CsvTable t({{"t", true}, {"distLo", true}, {"distHi", true}, {"deltaRatio", true}, {"crossing", false}});
    for (const auto& row : r.rows)
        t.row()
            .num(row.t, Provenance::Exact)
            .num(row.dist.lo, Provenance::CertifiedLo)
            .num(row.dist.hi, Provenance::CertifiedHi)
            .num(row.deltaRatio, Provenance::Exact)
            .text(row.crossing ? "1" : "0");
    return t.str();
}

inline std::string slope_summary(const SlopeReport& r) {
    std::ostringstream os;
    os << "verdict = " << to_string(r.verdict) << "\n"
       << "record = " << r.verdictRecord << "\n"
       << "tail_start = " << r.tailStart << "\n"
       << "truncation = " << format_double(r.truncation) << "\n"
       << "certificate_A = " << format_double(r.cert.A) << "\n"
       << "certificate_B = " << format_double(r.cert.B) << "\n"
       << "crossings = " << r.crossings.size() << "\n";
    for (const auto& c : r.crossings)
        os << "crossing = " << format_double(c.t) << " box " << c.box << " side " << (c.side > 0 ? "right" : "left") << "\n";
    return os.str();
}

inline std::string oscillation_summary(const OscillationLedger& L) {
    std::ostringstream os;
    os << "verdict = " << to_string(L.verdict) << "\n"
       << "beta1 = " << format_double(L.beta1) << "\n"
       << "betaFinal = " << format_double(L.betaFinal) << "\n"
       << "corridor_bound = " << format_double(L.corridorBound) << "\n"
       << "sides_alternate = " << (L.sidesAlternate ? "true" : "false") << "\n"
       << "truncation = " << format_double(L.tMax) << "\n"
       << "certificate_A = " << format_double(L.cert.A) << "\n"
       << "certificate_B = " << format_double(L.cert.B) << "\n"
       << "assumption = " << L.note << "\n";
    for (const auto& c : L.crossings) os << "crossing = " << format_double(c.t) << " side " << (c.side > 0 ? "right" : "left") << "\n";
    return os.str();
}

inline std::string oscillation_csv(const OscillationLedger& L) {
    CsvTable t({{"j", false}, {"found", false}, {"side", false}, {"r", true}, {"y", true}, {"span", true}, {"distLo", true}, {"distHi", true}, {"slack", true}, {"passed", false}});
    for (const auto& c : L.levels) {
        const LevelCertificate* lc = nullptr;
        for (const auto& x : L.certificates)
            if (x.j == c.j) lc = &x;
        t.row()
            .text(std::to_string(c.j))
            .text(c.found ? "yes" : "no")
            .text(c.side > 0 ? "right" : c.side < 0 ? "left" : "none")
            .num(c.r, Provenance::Measured)
            .num(c.y, Provenance::Measured)
            .num(c.span, Provenance::Measured)
            .num(lc ? lc->lo : 0.0, Provenance::CertifiedLo)
            .num(lc ? lc->hi : kInf, Provenance::CertifiedHi)
            .num(lc ? lc->slack : 0.0, Provenance::Measured)
            .text(lc ? (lc->passed ? "yes" : "no") : "n/a");
    }
    return t.str();
}

inline std::string tangential_csv(const TangentialReport& R) {
    CsvTable t({{"j", false}, {"found", false}, {"y", true}, {"distLo", true}, {"distHi", true}, {"slack", true}, {"model_bound", true}, {"paper_bound", true}});
    for (const auto& l : R.levels)
        t.row()
            .text(std::to_string(l.j))
            .text(l.corridor.found ? "yes" : "no")
            .num(l.y, Provenance::Measured)
            .num(l.lo, Provenance::CertifiedLo)
            .num(l.hi, Provenance::CertifiedHi)
            .num(l.slack, Provenance::Measured)
            .num(l.modelBound, Provenance::Exact)
            .num(l.paperBound, Provenance::Exact);
    return t.str();
}

inline std::string tangential_summary(const TangentialReport& R) {
    std::ostringstream os;
    os << "verdict = " << to_string(R.verdict) << "\n"
       << "strictly_increasing = " << (R.strictlyIncreasing ? "true" : "false") << "\n"
       << "final_at_least_twice_first = " << (R.finalDoubles ? "true" : "false") << "\n"
       << "parabola_samples = " << R.zAlphaSamples << "\n"
       << "parabola_failures = " << R.zAlphaFailures << "\n"
       << "truncation = " << format_double(R.tMax) << "\n"
       << "certificate_A = " << format_double(R.cert.A) << "\n"
       << "certificate_B = " << format_double(R.cert.B) << "\n";
    return os.str();
}

}  // namespace hypslit
