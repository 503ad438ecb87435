// Batch front-end for the slit-domain engine.

#include <cstdio>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "hypslit/io.hpp"

using namespace hypslit;

namespace {

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::WitnessInvalid:
    case ErrorKind::BadOrdering:
        return 2;
    case ErrorKind::DomainInvalid:
    case ErrorKind::PointOutsideDomain:
    case ErrorKind::EmptyStrip:
    case ErrorKind::ConstraintViolation:
    case ErrorKind::TrajectoryExitsDomain:
    case ErrorKind::CurveExitsDomain:
        return 3;
    case ErrorKind::CertificateFailed:
    case ErrorKind::MarginTooTight:
    case ErrorKind::CorridorNotFound:
        return 4;
    default:
        return 5;
    }
}

Point parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {parse_number("point", s), 0.0};
    return {parse_number("point", s.substr(0, comma)), parse_number("point", s.substr(comma + 1))};
}

std::vector<Point> parse_points(const std::string& s) {
    std::vector<Point> out;
    std::string t = s;
    std::replace(t.begin(), t.end(), ';', ' ');
    std::stringstream ss(t);
    std::string item;
    while (ss >> item) out.push_back(parse_point(item));
    return out;
}

Rect parse_window(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_number("window", item));
    if (v.size() != 4) throw Error(ErrorKind::ConfigError, "window needs x0,y0,x1,y1");
    const Rect r{v[0], v[1], v[2], v[3]};
    if (!r.valid()) throw Error(ErrorKind::ConfigError, "window is empty");
    return r;
}

struct Common {
    std::string domainFile, slits, ledgerFile, window, out;
    double cellSize = GridSpec{}.cellSize;
    int budget = 0;
    std::uint64_t seed = 20240601;
};

void add_common(CLI::App* c, Common& o, bool domain = true) {
    if (domain) {
        c->add_option("--domain-spec", o.domainFile, "domain spec file (slits = [...] or constructor = ...)");
        c->add_option("--slits", o.slits, "inline slit list, e.g. \"[(0,1),(2,1)]\"");
    }
    c->add_option("--ledger", o.ledgerFile, "constants ledger file");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--budget", o.budget, "grid refinement budget");
    c->add_option("--cell-size", o.cellSize, "absolute grid cell floor");
    c->add_option("--window", o.window, "grid window x0,y0,x1,y1");
    c->add_option("--out", o.out, "output directory (default $HYPSLIT_OUTPUT_DIR or .)");
}

GridSpec grid_of(const Common& o) {
    GridSpec g;
    g.cellSize = o.cellSize;
    if (!o.window.empty()) g.window = parse_window(o.window);
    validate(g);
    return g;
}

std::optional<ConstantsLedger> ledger_of(const Common& o) {
    if (o.ledgerFile.empty()) return std::nullopt;
    return deserialize_ledger(read_file(o.ledgerFile));
}

BuiltDomain domain_of(const Common& o) {
    DomainSpec spec;
    if (!o.slits.empty()) {
        spec.slits = parse_slit_list(o.slits);
    } else if (!o.domainFile.empty()) {
        spec = parse_domain_spec(read_file(o.domainFile));
    } else {
        throw Error(ErrorKind::ConfigError, "need --domain-spec or --slits");
    }
    return build_domain(spec, ledger_of(o), o.seed);
}

void emit(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    atomic_write(dir / name, content);
    std::cout << "wrote " << (dir / name).string() << "\n";
}

ModelDomain model_of(const std::string& kind, double a, double R, double M, double b, double beta, double r0, Point p) {
    if (kind == "disk") return Disk{};
    if (kind == "halfplane") return HalfPlane{};
    if (kind == "strip") return Strip{a, R};
    if (kind == "semistrip") return SemiStrip{a, R, M};
    if (kind == "koebe") return Koebe{p};
    if (kind == "sector") return HSector{beta, r0, p, 0};
    if (kind == "twoslit") return TwoSlit{a, b, R};
    throw Error(ErrorKind::ConfigError, "unknown model '" + kind + "'");
}

DomainSpec comb_spec(const std::string& configFile, DomainKind kind) {
    DomainSpec d;
    if (!configFile.empty()) d = parse_domain_spec(read_file(configFile));
    d.kind = kind;
    if (kind == DomainKind::Parabolic && configFile.empty()) {
        d.params.alpha = 2;
        d.params.beta = 0.7;
    }
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic geometry of slit domains"};
    app.require_subcommand(1);
    Common o;

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "calibrate a constants ledger");
    double c = 2, efrac = 0.5, delta = 0.1, N0 = 8;
    cal->add_option("--c", c);
    cal->add_option("--E-fraction", efrac);
    cal->add_option("--delta", delta);
    cal->add_option("--N0", N0);
    add_common(cal, o, false);

    // model-dist
    auto* md = app.add_subcommand("model-dist", "exact distance in a model domain");
    std::string model, zs, ws, ps = "0,0";
    double ma = 0, mR = 1, mM = 0, mb = -1, mbeta = kPi / 4, mr0 = 0;
    int digits = 6;
    md->add_option("--domain", model, "disk|halfplane|strip|semistrip|koebe|sector|twoslit")->required();
    md->add_option("--z", zs)->required();
    md->add_option("--w", ws)->required();
    md->add_option("--a", ma);
    md->add_option("--R", mR);
    md->add_option("--M", mM);
    md->add_option("--b", mb);
    md->add_option("--beta", mbeta);
    md->add_option("--r0", mr0);
    md->add_option("--p", ps, "Koebe tip / sector origin x,y");
    md->add_option("--digits", digits);

    // bounds
    auto* bd = app.add_subcommand("bounds", "certified distance bounds for point pairs");
    std::string pairs;
    bd->add_option("--pairs", pairs, "z1 w1 z2 w2 ... as x,y separated by spaces or ;")->required();
    add_common(bd, o);

    // geodesic
    auto* gd = app.add_subcommand("geodesic", "approximate geodesic with quasi-geodesic certificate");
    gd->add_option("--z", zs)->required();
    gd->add_option("--w", ws)->required();
    add_common(gd, o);

    // classify-nt
    auto* nt = app.add_subcommand("classify-nt", "non-tangential classifier on a trajectory w0 + it");
    std::string w0s = "0,1";
    double tMax = 1000, t0 = 1, wR = 1, wR0 = 0.5;
    int samples = 40;
    nt->add_option("--w0", w0s);
    nt->add_option("--tmax", tMax);
    nt->add_option("--samples", samples);
    nt->add_option("--p", ps, "Koebe witness tip x,y")->required();
    nt->add_option("--t0", t0, "ray start height above the tip");
    nt->add_option("--R", wR);
    nt->add_option("--R0", wR0);
    add_common(nt, o);

    // goodbox-scan
    auto* gb = app.add_subcommand("goodbox-scan", "detect good boxes");
    add_common(gb, o);

    // slope-scan
    auto* ss = app.add_subcommand("slope-scan", "distance of w0 + it to the reference geodesic");
    ss->add_option("--w0", w0s);
    ss->add_option("--tmax", tMax);
    ss->add_option("--samples", samples);
    add_common(ss, o);

    // oscillate / tangential
    std::string config;
    CombBuildParams P;
    auto* os = app.add_subcommand("oscillate", "oscillating comb experiment");
    auto* tg = app.add_subcommand("tangential", "parabolic comb experiment");
    for (auto* sc : {os, tg}) {
        sc->add_option("--config", config, "key = value parameter file; flags override");
        sc->add_option("--teeth", P.teeth);
        sc->add_option("--c", P.c);
        sc->add_option("--E-fraction", P.E_fraction);
        sc->add_option("--delta", P.delta);
        sc->add_option("--N0", P.N0);
        add_common(sc, o, false);
    }
    os->add_option("--alpha0", P.alpha0);
    os->add_option("--alpha1", P.alpha1);
    tg->add_option("--alpha", P.alpha);
    tg->add_option("--beta", P.beta);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cal) {
            LedgerOptions opt;
            opt.seed = o.seed;
            const ConstantsLedger L = build_ledger(c, efrac, delta, N0, opt);
            const std::string text = serialize_ledger(L);
            std::cout << text;
            emit(output_dir(o.out), "ledger.txt", text);
            const auto bad = ledger_violations(L);
            return bad.empty() ? 0 : 4;
        }
        if (*md) {
            const ModelDomain U = model_of(model, ma, mR, mM, mb, mbeta, mr0, parse_point(ps));
            validate(U);
            std::printf("%.*g\n", digits, distance(U, parse_point(zs), parse_point(ws)));
            return 0;
        }
        if (*bd) {
            const BuiltDomain D = domain_of(o);
            const DistanceEngine eng(D.omega, D.ledger, grid_of(o));
            const auto pts = parse_points(pairs);
            if (pts.size() % 2 != 0 || pts.empty()) throw Error(ErrorKind::ConfigError, "--pairs needs an even number of points");
            std::vector<std::pair<Point, Point>> pp;
            std::vector<BoundPair> bp;
            for (std::size_t i = 0; i < pts.size(); i += 2) {
                pp.emplace_back(pts[i], pts[i + 1]);
                bp.push_back(eng.bound(pts[i], pts[i + 1], o.budget));
            }
            const std::string csv = bounds_csv(pp, bp);
            std::cout << csv;
            emit(output_dir(o.out), "bounds.csv", csv);
            return 0;
        }
        if (*gd) {
            const BuiltDomain D = domain_of(o);
            const DistanceEngine eng(D.omega, D.ledger, grid_of(o));
            const Point z = parse_point(zs), w = parse_point(ws);
            const GeodesicResult g = approx_geodesic(eng, z, w, grid_of(o));
            const auto dir = output_dir(o.out);
            std::printf("q = %.17g\nA = %.17g\nB = %.17g\npoints = %zu\n", g.q, g.cert.A, g.cert.B, g.curve.size());
            emit(dir, "geodesic.csv", curve_csv(g.curve));
            Rect view = grid_of(o).window;
            if (!view.valid()) view = auto_window(D.omega, z, w);
            SvgScene svg(view);
            svg.slits(D.omega);
            svg.polyline(g.curve.points, "red");
            emit(dir, "geodesic.svg", svg.str());
            return 0;
        }
        if (*nt) {
            const BuiltDomain D = domain_of(o);
            SectorWitness W;
            W.U = Koebe{parse_point(ps)};
            W.rayStart = t0;
            W.R = wR;
            W.R0 = wR0;
            const Point w0 = parse_point(w0s);
            std::vector<Point> seq;
            for (int k = 1; k <= samples; ++k) seq.push_back(w0 + Point(0, tMax * k / samples));
            const ClassifierResult r = classify_nontangential(D.omega, W, seq);
            std::ostringstream rec;
            rec << "verdict = " << to_string(r.verdict) << "\nsector_inside = " << (r.sectorInside ? "true" : "false")
                << "\ntail_start = " << r.tailStart << "\nreason = " << r.reason << "\n";
            std::cout << rec.str();
            emit(output_dir(o.out), "classify.txt", rec.str());
            return 0;
        }
        if (*gb) {
            const BuiltDomain D = domain_of(o);
            if (!D.ledger) throw Error(ErrorKind::ConfigError, "goodbox-scan needs a ledger (--ledger or a comb constructor)");
            const std::string csv = boxes_csv(detect_good_boxes(D.omega, *D.ledger));
            std::cout << csv;
            emit(output_dir(o.out), "boxes.csv", csv);
            return 0;
        }
        if (*ss) {
            const BuiltDomain D = domain_of(o);
            const DistanceEngine eng(D.omega, D.ledger);
            std::vector<double> grid;
            for (int k = 1; k <= samples; ++k) grid.push_back(tMax * std::pow(2.0, -(samples - k) * 0.5));
            SlopeOptions so;
            so.budget = o.budget;
            so.grid = grid_of(o);
            const SlopeReport r = slope_scan(eng, parse_point(w0s), grid, so);
            const auto dir = output_dir(o.out);
            std::cout << slope_summary(r);
            emit(dir, "slope.csv", slope_csv(r));
            emit(dir, "slope.txt", slope_summary(r));
            return 0;
        }
        if (*os || *tg) {
            const bool osc = os->parsed();
            const auto* sc = osc ? os : tg;
            DomainSpec spec = comb_spec(config, osc ? DomainKind::Oscillating : DomainKind::Parabolic);
            auto take = [&](const char* flag, auto& dst, auto v) {
                if (sc->count(flag)) dst = v;
            };
            take("--teeth", spec.params.teeth, P.teeth);
            take("--c", spec.params.c, P.c);
            take("--E-fraction", spec.params.E_fraction, P.E_fraction);
            take("--delta", spec.params.delta, P.delta);
            take("--N0", spec.params.N0, P.N0);
            if (osc) {
                take("--alpha0", spec.params.alpha0, P.alpha0);
                take("--alpha1", spec.params.alpha1, P.alpha1);
            } else {
                take("--alpha", spec.params.alpha, P.alpha);
                take("--beta", spec.params.beta, P.beta);
            }
            const BuiltDomain D = build_domain(spec, ledger_of(o), o.seed);
            const DistanceEngine eng(D.omega, D.ledger);
            ExperimentOptions eo;
            eo.budget = o.budget;
            eo.grid = grid_of(o);
            const auto dir = output_dir(o.out);
            if (osc) {
                const OscillationLedger L = oscillation_experiment(eng, *D.oscillating, eo);
                std::cout << oscillation_summary(L);
                emit(dir, "oscillation.txt", oscillation_summary(L));
                emit(dir, "oscillation.csv", oscillation_csv(L));
                return L.verdict == Verdict::OscillationCertified ? 0 : 4;
            }
            const TangentialReport R = tangential_experiment(eng, *D.parabolic, eo, o.seed);
            std::cout << tangential_summary(R);
            emit(dir, "tangential.txt", tangential_summary(R));
            emit(dir, "tangential.csv", tangential_csv(R));
            return R.verdict == Verdict::TangentialEvidence ? 0 : 4;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
