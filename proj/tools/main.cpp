// Batch front end: parameter-space rasters, curve tracing, certificates, and
// reproduction recipes, emitted as CSV or JSONL with frozen schemas.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brz/cone.hpp"
#include "brz/horseshoe.hpp"
#include "brz/hyperbolic.hpp"
#include "brz/pool.hpp"
#include "brz/renorm.hpp"
#include "brz/sampling.hpp"
#include "brz/smooth.hpp"

namespace {

constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kDomainError = 1, kNumericalError = 2, kUsage = 64 };

// One output record: ordered key/value list. Floats print at 17 significant
// digits, infinity as the literal `inf`; NaN is forbidden in output.
class Row {
public:
    void add(const std::string& key, double v) {
        if (std::isnan(v)) throw brz::Error("NaN reached the output layer: " + key);
        char buf[40];
        if (std::isinf(v)) {
            std::snprintf(buf, sizeof buf, v > 0 ? "inf" : "-inf");
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", v);
        }
        cells_.emplace_back(key, Cell{std::string(buf), true});
    }
    void add(const std::string& key, long v) {
        cells_.emplace_back(key, Cell{std::to_string(v), true});
    }
    void add(const std::string& key, int v) { add(key, (long)v); }
    void add(const std::string& key, bool v) {
        cells_.emplace_back(key, Cell{std::string(v ? "1" : "0"), true});
    }
    void add(const std::string& key, const std::string& v) {
        cells_.emplace_back(key, Cell{v, false});
    }

    struct Cell {
        std::string text;
        bool numeric = false;
    };
    const std::vector<std::pair<std::string, Cell>>& cells() const { return cells_; }

private:
    std::vector<std::pair<std::string, Cell>> cells_;
};

class Writer {
public:
    Writer(const std::string& path, const std::string& format) : format_(format) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw brz::Error("cannot open output file " + path);
            out_ = &file_;
        } else {
            out_ = &std::cout;
        }
    }

    void write(const Row& row) {
        if (format_ == "csv") {
            if (!header_done_) {
                bool first = true;
                for (const auto& [k, c] : row.cells()) {
                    if (!first) *out_ << ",";
                    *out_ << k;
                    first = false;
                }
                *out_ << "\n";
                header_done_ = true;
            }
            bool first = true;
            for (const auto& [k, c] : row.cells()) {
                if (!first) *out_ << ",";
                *out_ << c.text;
                first = false;
            }
            *out_ << "\n";
        } else {  // jsonl
            *out_ << "{";
            bool first = true;
            for (const auto& [k, c] : row.cells()) {
                if (!first) *out_ << ",";
                *out_ << "\"" << k << "\":";
                if (c.numeric && c.text != "inf" && c.text != "-inf")
                    *out_ << c.text;
                else
                    *out_ << "\"" << c.text << "\"";
                first = false;
            }
            *out_ << "}\n";
        }
    }

private:
    std::string format_;
    std::ofstream file_;
    std::ostream* out_ = nullptr;
    bool header_done_ = false;
};

std::vector<long> parse_word(const std::string& s) {
    std::vector<long> word;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) word.push_back(std::stol(tok));
    }
    if (word.empty()) throw CLI::ValidationError("--word", "empty word");
    return word;
}

// --window "fwd:1,2,1;bwd:2,1"
brz::SymbolWindow parse_window(const std::string& s) {
    brz::SymbolWindow w;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.rfind("fwd:", 0) == 0) {
            w.forward = parse_word(part.substr(4));
        } else if (part.rfind("bwd:", 0) == 0) {
            w.backward = parse_word(part.substr(4));
        } else {
            throw CLI::ValidationError("--window", "expected fwd:...;bwd:...");
        }
    }
    w.check();
    return w;
}

std::string entries_str(const brz::ContinuedFraction& cf) {
    std::string s;
    for (int i = 0; i < cf.depth(); ++i) {
        if (i) s += ":";
        s += cf.entries[i].str();
    }
    return s;
}

struct CommonOpts {
    double c = 1.5;
    double a = 1.0;
    double v = 0.25;
    int depth = 10;
    long r_cap = 100000;
    int grid = 200;
    double tol = 1e-9;
    unsigned long seed = 1;
    std::string out;
    std::string format = "csv";
    std::string word_str;
    std::string window_str;
    double eps = 0.3;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double nu = std::numeric_limits<double>::quiet_NaN();
    bool unstable = false;
    double a_min = std::numeric_limits<double>::quiet_NaN();
    double a_max = std::numeric_limits<double>::quiet_NaN();
    double v_min = std::numeric_limits<double>::quiet_NaN();
    double v_max = std::numeric_limits<double>::quiet_NaN();
};

void stamp(Row& row, const CommonOpts& o) {
    row.add("schema_version", kSchemaVersion);
    row.add("tol", o.tol);
    row.add("r_cap", o.r_cap);
}

int cmd_rotnum(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::Params p = brz::validate_params(o.a, o.v, o.c);
    const brz::RotationNumber rn = brz::rotation_number(p, o.depth, o.r_cap);
    Row row;
    stamp(row, o);
    row.add("cmd", std::string("rotnum"));
    row.add("c", o.c);
    row.add("a", o.a);
    row.add("v", o.v);
    row.add("depth", o.depth);
    row.add("entries", entries_str(rn.cf));
    row.add("value_lo", rn.value_lo);
    row.add("value_hi", rn.value_hi);
    row.add("degenerate_halt", rn.degenerate_halt);
    w.write(row);
    return kOk;
}

int cmd_renorm_orbit(const CommonOpts& o) {
    Writer w(o.out, o.format);
    brz::Params p = brz::validate_params(o.a, o.v, o.c);
    for (int step = 0; step < o.depth; ++step) {
        const brz::StepResult s = brz::renormalize_T(p, o.r_cap);
        Row row;
        stamp(row, o);
        row.add("step", step);
        row.add("a", p.a);
        row.add("v", p.v);
        row.add("c", p.c);
        row.add("r0", s.r0.r);
        row.add("r1", s.r1 ? s.r1->r : -1L);
        row.add("lambda", s.lambda);
        row.add("residual", s.residual);
        row.add("image_a", s.new_params.a);
        row.add("image_v", s.new_params.v);
        w.write(row);
        p = s.new_params;
    }
    return kOk;
}

int cmd_regions(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const double c = o.c;
    const double alo = std::isnan(o.a_min) ? 1e-3 : o.a_min;
    const double ahi = std::isnan(o.a_max) ? c : o.a_max;
    const double vlo = std::isnan(o.v_min) ? std::min(0.0, c - 1.0) - 0.5 : o.v_min;
    const double vhi = std::isnan(o.v_max) ? std::max(0.0, c - 1.0) + 2.0 : o.v_max;
    const int n = o.grid;
    if (n < 2) throw CLI::ValidationError("--grid", "raster needs at least 2x2 cells");

    struct CellOut {
        double a, v;
        brz::RegionClass rc;
        brz::Height h;
        double rho_lo = 0, rho_hi = 0;
        bool rho_ok = false;
    };
    std::vector<CellOut> cells(static_cast<std::size_t>(n) * n);
    brz::parallel_for_indexed(cells.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / n;  // row: v index
        const int j = static_cast<int>(idx) % n;  // col: a index
        CellOut& cell = cells[idx];
        cell.a = alo + (ahi - alo) * (j + 0.5) / n;
        cell.v = vlo + (vhi - vlo) * (i + 0.5) / n;
        cell.rc = brz::classify(cell.a, cell.v, c, o.r_cap);
        if (cell.rc.in_D) {
            if (cell.rc.status == brz::RegionClass::Status::Renormalizable)
                cell.h = cell.rc.k;
            try {
                const brz::RotationNumber rn =
                    brz::rotation_number(brz::Params::lenient(cell.a, cell.v, c),
                                         std::min(o.depth, 8), o.r_cap);
                cell.rho_lo = rn.value_lo;
                cell.rho_hi = rn.value_hi;
                cell.rho_ok = true;
            } catch (const brz::Error&) {
                cell.rho_ok = false;
            }
        }
    });

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const CellOut& cell = cells[static_cast<std::size_t>(i) * n + j];
            Row row;
            stamp(row, o);
            row.add("i", i);
            row.add("j", j);
            row.add("a", cell.a);
            row.add("v", cell.v);
            row.add("in_d", cell.rc.in_D);
            row.add("in_delta", cell.rc.in_Delta);
            std::string cls = "outside";
            if (cell.rc.in_D) {
                switch (cell.rc.status) {
                    case brz::RegionClass::Status::NonRenormalizable: cls = "nonrenorm"; break;
                    case brz::RegionClass::Status::Renormalizable: cls = "renorm"; break;
                    case brz::RegionClass::Status::Undecided: cls = "undecided"; break;
                }
            }
            row.add("class", cls);
            row.add("height", cell.rc.status == brz::RegionClass::Status::Renormalizable
                                  ? cell.h.str()
                                  : std::string(cls == "nonrenorm" ? "inf" : ""));
            row.add("rho_lo", cell.rho_ok ? cell.rho_lo : 0.0);
            row.add("rho_hi", cell.rho_ok ? cell.rho_hi : 0.0);
            row.add("boundary_band", cell.rc.boundary_band);
            row.add("methods_disagree", cell.rc.methods_disagree);
            w.write(row);
        }
    }
    return kOk;
}

int cmd_periodic(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const std::vector<long> word = parse_word(o.word_str);
    const brz::PeriodicPoint pp = brz::find_periodic_point(o.c, word, o.tol, o.r_cap);

    brz::Mat2 J = {{{1, 0}, {0, 1}}};
    brz::Params cur = pp.point;
    for (int j = 0; j < pp.period; ++j) {
        const brz::JetT jt = brz::jet_T(cur, o.r_cap);
        brz::Mat2 next;
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l)
                next[i][l] = jt.J[i][0] * J[0][l] + jt.J[i][1] * J[1][l];
        J = next;
        cur = jt.image;
    }
    const brz::JacobianRecord rec = brz::hyperbolic_certificate(pp.point, J);

    Row row;
    stamp(row, o);
    row.add("cmd", std::string("periodic"));
    row.add("c", o.c);
    row.add("word", o.word_str);
    row.add("a", pp.point.a);
    row.add("v", pp.point.v);
    row.add("period", pp.period);
    row.add("residual", pp.residual);
    std::string hs;
    for (size_t i = 0; i < pp.heights_verified.size(); ++i) {
        if (i) hs += ":";
        hs += std::to_string(pp.heights_verified[i]);
    }
    row.add("heights_verified", hs);
    row.add("lambda_u", rec.lambda_u);
    row.add("lambda_s", rec.lambda_s);
    row.add("margin", rec.margin);
    row.add("eu_a", rec.e_u.alpha);
    row.add("eu_v", rec.e_u.nu);
    row.add("es_a", rec.e_s.alpha);
    row.add("es_v", rec.e_s.nu);
    row.add("unsupported_regime", rec.unsupported_regime);
    w.write(row);
    return kOk;
}

int cmd_curve(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const std::vector<long> word = parse_word(o.word_str);
    const brz::ParamCurve curve =
        o.unstable ? brz::trace_unstable_curve(o.c, word, o.depth, o.grid, o.r_cap)
                   : brz::trace_stable_curve(o.c, word, o.depth, o.grid, o.r_cap);
    int idx = 0;
    for (const brz::CurveVertex& vx : curve.vertices) {
        Row row;
        stamp(row, o);
        row.add("idx", idx++);
        row.add("transversal_id", vx.transversal_id);
        row.add("t", vx.t);
        row.add("a", vx.ok ? vx.point.a : 0.0);
        row.add("v", vx.ok ? vx.point.v : 0.0);
        row.add("vertex_tol", vx.tolerance);
        row.add("ok", vx.ok);
        row.add("involution_flagged", vx.involution_flagged);
        w.write(row);
    }
    return kOk;
}

int cmd_attractor(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::SymbolWindow win = parse_window(o.window_str);
    brz::AttractorOptions opts;
    opts.depth = o.depth;
    opts.r_cap = o.r_cap;
    opts.refine_tol = o.tol;
    opts.estimate_depth_error = true;
    const brz::AttractorPoint ap = brz::attractor_point(o.c, win, opts);
    Row row;
    stamp(row, o);
    row.add("cmd", std::string("attractor"));
    row.add("c", o.c);
    row.add("window", o.window_str);
    row.add("a", ap.point.a);
    row.add("v", ap.point.v);
    row.add("residual", ap.residual);
    row.add("method", std::string(ap.method == brz::AttractorMethod::CurveIntersection
                                      ? "curve_intersection"
                                      : "periodic_shadow"));
    if (std::isnan(ap.depth_error))
        row.add("depth_error", std::string(""));
    else
        row.add("depth_error", ap.depth_error);
    w.write(row);
    return kOk;
}

int cmd_hyperbolicity(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::SymbolWindow win = parse_window(o.window_str);
    const brz::OrbitSplitting os = brz::orbit_splitting(o.c, win, o.depth);
    for (size_t j = 0; j < os.points.size(); ++j) {
        Row row;
        stamp(row, o);
        row.add("j", (long)j);
        row.add("a", os.points[j].a);
        row.add("v", os.points[j].v);
        row.add("eu_a", os.Eu[j].alpha);
        row.add("eu_v", os.Eu[j].nu);
        row.add("es_a", os.Es[j].alpha);
        row.add("es_v", os.Es[j].nu);
        row.add("expansion", os.expansion[j]);
        row.add("contraction", os.contraction[j]);
        row.add("k0", os.k0);
        row.add("lambda", os.lambda);
        row.add("min_angle", os.min_angle);
        w.write(row);
    }
    return kOk;
}

int cmd_duality_check(const CommonOpts& o) {
    Writer w(o.out, o.format);
    brz::Sampler smp(o.seed);
    int produced = 0;
    int guard = 0;
    while (produced < o.grid && guard++ < 100 * o.grid) {
        brz::Params p;
        try {
            p = smp.sample_Delta_O2(o.c, o.r_cap);
        } catch (const brz::Error&) {
            continue;
        }
        Row row;
        stamp(row, o);
        row.add("idx", produced);
        row.add("a", p.a);
        row.add("v", p.v);
        row.add("c", p.c);

        const brz::InvolutionResult ir = brz::involution_I(p);
        const brz::InvolutionResult back = brz::involution_I(ir.image);
        row.add("roundtrip_err", std::hypot(back.image.a - p.a, back.image.v - p.v));
        row.add("jac_det", ir.jacobian_det);
        row.add("domain_violation", ir.domain_violation);
        const bool consistent = brz::duality_consistent_R(p);
        row.add("consistent", consistent);

        double recover_err = std::numeric_limits<double>::infinity();
        long h_src = -1, h_dual = -1;
        try {
            const brz::StepResult s = brz::renormalize_R(p, o.r_cap);
            const brz::Params backp = brz::dual_inverse_R(s.new_params, o.r_cap);
            recover_err = std::hypot(backp.a - p.a, backp.v - p.v);
        } catch (const brz::Error&) {
        }
        try {
            h_src = brz::height(p, o.r_cap).r;
            if (consistent) {
                const brz::Params dual = brz::involution_I_strict(p);
                h_dual = brz::height(brz::dual_inverse_R(dual, o.r_cap), o.r_cap).r;
            }
        } catch (const brz::Error&) {
        }
        row.add("recover_err", recover_err);
        row.add("height_src", h_src);
        row.add("height_dual_preimage", h_dual);
        w.write(row);
        ++produced;
    }
    return kOk;
}

int cmd_cone_check(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::Params p = brz::validate_params(o.a, o.v, o.c);
    brz::TangentVector vb;
    if (std::isnan(o.alpha) || std::isnan(o.nu)) {
        vb = brz::canonical_cone_vector(p);
    } else {
        vb = brz::TangentVector{o.alpha, o.nu};
    }
    const brz::ConeCheck cc = brz::in_cone(p, vb, std::max(o.grid, 16), o.tol);
    Row row;
    stamp(row, o);
    row.add("cmd", std::string("cone-check"));
    row.add("a", o.a);
    row.add("v", o.v);
    row.add("c", o.c);
    row.add("alpha", vb.alpha);
    row.add("nu", vb.nu);
    std::string verdict = "undecided";
    if (cc.verdict == brz::ConeVerdict::Inside) verdict = "inside";
    if (cc.verdict == brz::ConeVerdict::Outside) verdict = "outside";
    row.add("verdict", verdict);
    row.add("infimum", cc.infimum);
    row.add("arg_x", cc.arg_x);
    row.add("unsupported_regime", cc.unsupported_regime);
    w.write(row);
    return kOk;
}

int cmd_converge(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::Params base = brz::validate_params(o.a, o.v, o.c);
    brz::GeneralBreakMap f(base, o.eps);
    brz::GeneralPipelineOptions popts;
    popts.r_cap = o.r_cap;
    const brz::ConvergenceReport rep = brz::convergence_report(f, o.depth, popts);
    for (size_t i = 0; i < rep.levels.size(); ++i) {
        const brz::ModelFit& m = rep.levels[i];
        Row row;
        stamp(row, o);
        row.add("n", (long)(i + 1));
        row.add("c_n", rep.c_n[i]);
        row.add("a_n", m.a);
        row.add("b_n", m.b);
        row.add("v_n", m.v);
        row.add("dist_c0", m.dist_c0);
        row.add("dist_c2", m.dist_c2);
        row.add("eps", o.eps);
        row.add("lambda_hat", rep.lambda_hat);
        row.add("monotone_c0", rep.monotone_c0);
        w.write(row);
    }
    return kOk;
}

int cmd_apriori_scan(const CommonOpts& o) {
    Writer w(o.out, o.format);
    const brz::AprioriScan scan = brz::apriori_scan(o.c, o.grid, o.seed, o.r_cap);
    Row row;
    stamp(row, o);
    row.add("cmd", std::string("apriori-scan"));
    row.add("c", o.c);
    row.add("samples", o.grid);
    row.add("accepted", scan.accepted);
    row.add("rejected", scan.rejected);
    row.add("min_lambda", scan.min_lambda);
    row.add("delta", scan.delta);
    w.write(row);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"renormalization of circle maps with a break singularity"};
    app.require_subcommand(1);

    CommonOpts o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--c", o.c, "break parameter c (c^2 is the break size)");
        sub->add_option("--a", o.a, "parameter a");
        sub->add_option("--v", o.v, "parameter v");
        sub->add_option("--word", o.word_str, "height word, comma separated");
        sub->add_option("--window", o.window_str, "symbol window fwd:...;bwd:...");
        sub->add_option("--depth", o.depth, "expansion depth / level count");
        sub->add_option("--r-cap", o.r_cap, "height iteration cap");
        sub->add_option("--grid", o.grid, "grid size / sample count");
        sub->add_option("--tol", o.tol, "tolerance override");
        sub->add_option("--seed", o.seed, "RNG seed (fixes all sampling)");
        sub->add_option("--out", o.out, "output path (default stdout)");
        sub->add_option("--format", o.format, "csv or jsonl")
            ->check(CLI::IsMember({"csv", "jsonl"}));
        sub->add_option("--eps", o.eps, "conjugacy amplitude (converge)");
        sub->add_option("--alpha", o.alpha, "tangent vector a-component (cone-check)");
        sub->add_option("--nu", o.nu, "tangent vector v-component (cone-check)");
        sub->add_option("--a-min", o.a_min, "raster a lower bound");
        sub->add_option("--a-max", o.a_max, "raster a upper bound");
        sub->add_option("--v-min", o.v_min, "raster v lower bound");
        sub->add_option("--v-max", o.v_max, "raster v upper bound");
        sub->add_flag("--unstable", o.unstable, "trace the unstable curve (curve)");
    };

    std::vector<std::pair<std::string, int (*)(const CommonOpts&)>> cmds = {
        {"rotnum", cmd_rotnum},
        {"renorm-orbit", cmd_renorm_orbit},
        {"regions", cmd_regions},
        {"periodic", cmd_periodic},
        {"curve", cmd_curve},
        {"attractor", cmd_attractor},
        {"hyperbolicity", cmd_hyperbolicity},
        {"duality-check", cmd_duality_check},
        {"cone-check", cmd_cone_check},
        {"converge", cmd_converge},
        {"apriori-scan", cmd_apriori_scan},
    };
    for (auto& [name, fn] : cmds) add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kUsage;
    }

    try {
        for (auto& [name, fn] : cmds) {
            if (app.get_subcommand(name)->parsed()) return fn(o);
        }
        std::cerr << "no subcommand dispatched\n";
        return kUsage;
    } catch (const brz::ConstraintViolation& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const brz::UnsupportedBreak& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const brz::DomainViolation& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const brz::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
}
