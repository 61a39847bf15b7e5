#include "pii/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "pii/asymp_series.hpp"
#include "pii/connection.hpp"
#include "pii/pii_ode.hpp"
#include "pii/selftest.hpp"
#include "pii/verifier.hpp"

namespace pii::cli {

namespace {

constexpr double kPi = std::numbers::pi;

// Raised for errors that map to exit 2 (bad input, domain).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

struct RunConfig {
    std::string family = "real";
    std::string alpha = "0";
    std::string k = "0";
    double x0 = kDefaultX0;
    double x_end = -150.0;
    double tol = 1e-11;
    int stations = 24;
    std::string format;
    std::string out_path;
};

PIIParams make_params(const RunConfig& cfg) {
    PIIParams p;
    try {
        p.alpha = parse_complex(cfg.alpha);
        p.k = parse_complex(cfg.k);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    p.family = cfg.family == "imag" ? Family::ImagAS : Family::RealAS;
    try {
        p.check_family();
    } catch (const InvalidParams& e) {
        throw UsageError(e.what());
    }
    return p;
}

PIIParams admissible_params(const RunConfig& cfg) {
    PIIParams p = make_params(cfg);
    try {
        p.validate();
    } catch (const InvalidParams& e) {
        throw UsageError(e.what());
    }
    return p;
}

void emit(const Table& t, const std::string& format, const std::string& path, std::ostream& out) {
    const std::string text = format == "json" ? to_json(t) + "\n" : to_csv(t);
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw UsageError("cannot open output file: " + path);
    f << text;
}

Table single(std::vector<std::pair<std::string, Field>> fields) {
    Table t;
    t.rows.emplace_back();
    for (auto& [k, v] : fields) {
        t.columns.push_back(k);
        t.rows.back().push_back(std::move(v));
    }
    return t;
}

std::vector<std::pair<std::string, Field>> param_fields(const PIIParams& p) {
    return {{"family", to_string(p.family)},
            {"alpha_re", p.alpha.real()},
            {"alpha_im", p.alpha.imag()},
            {"k_re", p.k.real()},
            {"k_im", p.k.imag()}};
}

// --- subcommands -----------------------------------------------------------

int cmd_coeffs(const RunConfig& cfg, int n_max, std::ostream& out) {
    if (n_max < 0 || n_max > 50)
        throw UsageError("n-max must lie in [0, 50]");
    cplx alpha;
    try {
        alpha = parse_complex(cfg.alpha);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bool real = alpha.imag() == 0.0;
    if (real && !(std::abs(alpha.real()) < 0.5))
        throw UsageError("real alpha must lie in (-1/2, 1/2)");
    if (!real && alpha.real() != 0.0)
        throw UsageError("alpha must be real or purely imaginary");

    const SeriesCoeffs s = series_coeffs(alpha, n_max);
    Table t;
    t.columns = {"n", "a_n"};
    for (std::size_t n = 0; n < s.coeffs.size(); ++n)
        t.rows.push_back({static_cast<long long>(n), s.coeffs[n].real()});
    emit(t, cfg.format.empty() ? "csv" : cfg.format, cfg.out_path, out);
    return s.saturated ? kExitFail : kExitOk;
}

int cmd_connect(const RunConfig& cfg, std::ostream& out) {
    const PIIParams p = admissible_params(cfg);
    const Connection c = connect(p);
    auto fields = param_fields(p);
    if (std::holds_alternative<TrivialConnection>(c)) {
        fields.emplace_back("trivial", true);
    } else {
        const auto& d = std::get<ConnectionData>(c);
        const StokesTriple s = stokes_from_params(p);
        fields.emplace_back("trivial", false);
        if (p.family == Family::RealAS)
            fields.emplace_back("d", d.d.real());
        else
            fields.emplace_back("d_im", d.d.imag());
        fields.emplace_back("phi", d.phi);
        fields.emplace_back("nu_im", d.nu.imag());
        fields.emplace_back("s1_re", s.s1.real());
        fields.emplace_back("s1_im", s.s1.imag());
        fields.emplace_back("s2_re", s.s2.real());
        fields.emplace_back("s2_im", s.s2.imag());
        fields.emplace_back("s3_re", s.s3.real());
        fields.emplace_back("s3_im", s.s3.imag());
    }
    emit(single(std::move(fields)), cfg.format.empty() ? "json" : cfg.format, cfg.out_path, out);
    return kExitOk;
}

int cmd_integrate(const RunConfig& cfg, double spacing, std::ostream& out) {
    const PIIParams p = make_params(cfg);
    IntegrateOptions opts;
    opts.sample_spacing = spacing;
    Trajectory traj;
    try {
        traj = integrate(p, cfg.x0, cfg.x_end, init_plus(p, cfg.x0), cfg.tol, opts);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    if (traj.status == Status::PoleDetected)
        throw PoleError("pole detected near x = " + format_double(traj.x_pole));

    Table t;
    if (p.family == Family::RealAS)
        t.columns = {"x", "u", "u_prime"};
    else
        t.columns = {"x", "u_im", "u_prime_im", "v", "v_prime"};
    for (const State& s : traj.samples) {
        if (p.family == Family::RealAS)
            t.rows.push_back({s.x, s.u.real(), s.up.real()});
        else
            t.rows.push_back({s.x, s.u.imag(), s.up.imag(), s.u.imag(), s.up.imag()});
    }
    emit(t, cfg.format.empty() ? "csv" : cfg.format, cfg.out_path, out);
    return traj.status == Status::Completed ? kExitOk : kExitFail;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const PIIParams p = make_params(cfg);
    if (p.is_trivial())
        throw UsageError("(0, 0) is the zero solution; nothing to verify");
    if (cfg.stations < 3)
        throw UsageError("stations must be at least 3");
    if (!(cfg.x0 >= kInitMinArgument))
        throw UsageError("x0 must be at least 8");
    if (!(cfg.tol >= 1e-14 && cfg.tol <= 1e-6))
        throw UsageError("tol must lie in [1e-14, 1e-6]");
    VerifyConfig vc;
    vc.x0 = cfg.x0;
    vc.x_end = cfg.x_end;
    vc.tol = cfg.tol;
    vc.stations = cfg.stations;
    const VerificationReport r = verify_connection(p, vc);
    if (r.pole_status == Status::PoleDetected)
        throw PoleError("pole detected near x = " + format_double(r.x_pole));

    auto fields = param_fields(p);
    const bool real = p.family == Family::RealAS;
    fields.emplace_back(real ? "d_pred" : "d_pred_im", real ? r.predicted.d.real() : r.predicted.d.imag());
    fields.emplace_back("phi_pred", r.predicted.phi);
    fields.emplace_back(real ? "d_fit" : "d_fit_im", real ? r.fitted.d_fit.real() : r.fitted.d_fit.imag());
    fields.emplace_back("phi_fit", r.fitted.phi_fit);
    fields.emplace_back("fit_residual", r.fitted.fit_residual);
    fields.emplace_back("err_d_rel", r.err_d_rel);
    fields.emplace_back("err_phi_abs", r.err_phi_abs);
    fields.emplace_back("pole_status", to_string(r.pole_status));
    fields.emplace_back("pass", r.pass);
    fields.emplace_back("error", r.error);
    emit(single(std::move(fields)), cfg.format.empty() ? "json" : cfg.format, cfg.out_path, out);
    return r.pass ? kExitOk : kExitFail;
}

std::vector<double> parse_list(std::string_view s) {
    std::vector<double> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        out.push_back(parse_real(s.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

// "default" | "alpha=a,b,...;r=r1,r2,..." | "real:0:1.2;imag:0.3i:0.5i"
std::vector<PIIParams> parse_grid(const std::string& spec) {
    if (spec == "default")
        return default_scan_grid();
    std::vector<std::string_view> parts;
    std::string_view rest(spec);
    while (!rest.empty()) {
        const auto semi = rest.find(';');
        parts.push_back(rest.substr(0, semi));
        if (semi == std::string_view::npos)
            break;
        rest.remove_prefix(semi + 1);
    }
    std::vector<PIIParams> grid;
    try {
        if (spec.find('=') != std::string::npos) {
            std::vector<double> alphas, rs;
            for (auto part : parts) {
                const auto eq = part.find('=');
                if (eq == std::string_view::npos)
                    throw std::invalid_argument("grid: expected key=values");
                const auto key = part.substr(0, eq);
                const auto vals = parse_list(part.substr(eq + 1));
                if (key == "alpha")
                    alphas = vals;
                else if (key == "r")
                    rs = vals;
                else
                    throw std::invalid_argument("grid: unknown key '" + std::string(key) + "'");
            }
            for (double a : alphas)
                for (double r : rs)
                    grid.push_back(PIIParams::real(a, r * std::cos(kPi * a)));
        } else {
            for (auto part : parts) {
                const auto c1 = part.find(':');
                const auto c2 = part.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
                if (c1 == std::string_view::npos || c2 == std::string_view::npos)
                    throw std::invalid_argument("grid: expected family:alpha:k");
                const auto fam = part.substr(0, c1);
                if (fam != "real" && fam != "imag")
                    throw std::invalid_argument("grid: family must be real or imag");
                PIIParams p{parse_complex(part.substr(c1 + 1, c2 - c1 - 1)), parse_complex(part.substr(c2 + 1)),
                            fam == "real" ? Family::RealAS : Family::ImagAS};
                p.check_family();
                grid.push_back(p);
            }
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (grid.empty())
        throw UsageError("grid is empty");
    return grid;
}

unsigned thread_cap() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PII_NUM_THREADS")) {
        try {
            const double v = parse_real(env);
            if (v >= 1.0)
                return std::min(hw, static_cast<unsigned>(v));
        } catch (const std::invalid_argument&) {
        }
    }
    return hw;
}

int cmd_scan(const RunConfig& cfg, const std::string& grid_spec, double x_max, std::ostream& out) {
    const auto grid = parse_grid(grid_spec);
    if (!(cfg.x_end >= -150.0 && x_max <= 15.0 && cfg.x_end < kDefaultX0))
        throw UsageError("scan window must lie in [-150, 15] and reach below x = 8");
    ScanConfig sc;
    sc.tol = cfg.tol;
    sc.threads = thread_cap();
    const auto rows = scan_pole_free(grid, cfg.x_end, x_max, sc);

    Table t;
    t.columns = {"family", "alpha_re", "alpha_im", "k_re", "k_im", "admissible", "status", "x_pole"};
    bool ok = true;
    for (const ScanRow& r : rows) {
        const bool pole = r.status == Status::PoleDetected;
        t.rows.push_back({to_string(r.params.family), r.params.alpha.real(), r.params.alpha.imag(), r.params.k.real(),
                          r.params.k.imag(), r.admissible, to_string(r.status),
                          pole ? r.x_pole : std::numeric_limits<double>::quiet_NaN()});
        if (r.admissible && r.status != Status::Completed)
            ok = false;
    }
    emit(t, cfg.format.empty() ? "csv" : cfg.format, cfg.out_path, out);
    return ok ? kExitOk : kExitFail;
}

int cmd_laxcheck(const RunConfig& cfg, const std::string& lambda_str, int draws, unsigned long long seed,
                 std::ostream& out) {
    cplx fixed_lambda = 0.0;
    if (!lambda_str.empty()) {
        try {
            fixed_lambda = parse_complex(lambda_str);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (fixed_lambda == 0.0)
            throw UsageError("lambda = 0 is singular");
    }
    if (draws < 1)
        throw UsageError("draws must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0), lr(std::log(0.1), std::log(10.0)), ang(0.0, 2.0 * kPi);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = 10.0 * u(rng);
        const cplx uu(u(rng), u(rng)), up(u(rng), u(rng)), upp(u(rng), u(rng)), alpha(u(rng), u(rng));
        const cplx lam = lambda_str.empty() ? std::polar(std::exp(lr(rng)), ang(rng)) : fixed_lambda;
        const Mat2 m = lax_compatibility(x, uu, up, upp, alpha, lam);
        const cplx r2 = 2.0 * pii_residual(x, uu, upp, alpha);
        worst = std::max({worst, std::abs(m[0][0]), std::abs(m[1][1]), std::abs(m[0][1] + r2), std::abs(m[1][0] + r2)});
    }
    const bool pass = worst <= 1e-12;
    emit(single({{"draws", static_cast<long long>(draws)}, {"max_defect", worst}, {"pass", pass}}),
         cfg.format.empty() ? "json" : cfg.format, cfg.out_path, out);
    return pass ? kExitOk : kExitFail;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
    const auto results = run_selftest();
    Table t;
    t.columns = {"check", "pass", "value", "limit"};
    bool all = true;
    for (const auto& r : results) {
        t.rows.push_back({r.name, r.pass, r.value, r.limit});
        all = all && r.pass;
    }
    emit(t, cfg.format.empty() ? "csv" : cfg.format, cfg.out_path, out);
    return all ? kExitOk : kExitFail;
}

std::string field_csv(const Field& f) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, long long>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else {
                if (v.find_first_of(",\"\n") == std::string::npos)
                    return v;
                std::string q = "\"";
                for (char c : v)
                    q += c == '"' ? std::string("\"\"") : std::string(1, c);
                return q + "\"";
            }
        },
        f);
}

}  // namespace

std::complex<double> parse_complex(std::string_view s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            t += c;
    if (t.empty())
        throw std::invalid_argument("empty number");
    if (t.back() != 'i')
        return {parse_real(t), 0.0};
    t.pop_back();
    // Split at the last sign that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = t.size(); i-- > 1;) {
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const std::string re = split == std::string::npos ? "" : t.substr(0, split);
    std::string im = split == std::string::npos ? t : t.substr(split);
    if (im.empty() || im == "+")
        im = "1";
    else if (im == "-")
        im = "-1";
    return {re.empty() ? 0.0 : parse_real(re), parse_real(im)};
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, ptr);
}

std::string to_csv(const Table& t) {
    std::string s;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        s += (i ? "," : "") + t.columns[i];
    s += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            s += (i ? "," : "") + field_csv(row[i]);
        s += '\n';
    }
    return s;
}

std::string to_json(const Table& t) {
    auto object = [&](const std::vector<Field>& row) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit([&](const auto& v) { o[t.columns[i]] = v; }, row[i]);
        return o;
    };
    if (t.rows.size() == 1)
        return object(t.rows.front()).dump();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows)
        arr.push_back(object(row));
    return arr.dump();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ablowitz-Segur solutions of inhomogeneous Painleve II"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool params, bool integration) {
        if (params) {
            sub->add_option("--family", cfg.family, "Solution family")->check(CLI::IsMember({"real", "imag"}));
            sub->add_option("--alpha", cfg.alpha, "alpha, e.g. 0.25 or 0.3i");
            sub->add_option("--k", cfg.k, "k, e.g. 0.5 or 1.0i");
        }
        if (integration) {
            sub->add_option("--x0", cfg.x0, "Start of integration on the decaying side");
            sub->add_option("--x-end", cfg.x_end, "End of integration");
            sub->add_option("--tol", cfg.tol, "Local error tolerance");
        }
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out_path, "Write to file instead of stdout");
    };

    int n_max = 10;
    auto* coeffs = app.add_subcommand("coeffs", "Series coefficients a_n");
    coeffs->add_option("--alpha", cfg.alpha, "alpha");
    coeffs->add_option("--n-max", n_max, "Highest index");
    coeffs->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
    coeffs->add_option("--out", cfg.out_path);

    auto* connect_cmd = app.add_subcommand("connect", "Connection data (d, phi, nu, Stokes)");
    add_common(connect_cmd, true, false);

    double spacing = 0.5;
    auto* integrate_cmd = app.add_subcommand("integrate", "Integrate from x0 to x-end");
    add_common(integrate_cmd, true, true);
    integrate_cmd->add_option("--spacing", spacing, "Sample spacing");

    auto* verify_cmd = app.add_subcommand("verify", "Compare fitted and predicted connection data");
    add_common(verify_cmd, true, true);
    verify_cmd->add_option("--stations", cfg.stations, "Number of fit stations");

    std::string grid = "default";
    double x_max = 15.0;
    auto* scan_cmd = app.add_subcommand("scan", "Pole-free scan over a parameter grid");
    add_common(scan_cmd, false, false);
    scan_cmd->add_option("--grid", grid, "default | alpha=..;r=.. | real:a:k;imag:ai:ki");
    scan_cmd->add_option("--x-end", cfg.x_end, "Lower end of the window")->default_str("-60");
    scan_cmd->add_option("--x-max", x_max, "Upper end of the window");
    scan_cmd->add_option("--tol", cfg.tol, "Local error tolerance");

    std::string lambda;
    int draws = 1000;
    unsigned long long seed = 1;
    auto* lax_cmd = app.add_subcommand("laxcheck", "Zero-curvature defect at random points");
    add_common(lax_cmd, false, false);
    lax_cmd->add_option("--lambda", lambda, "Fixed spectral parameter");
    lax_cmd->add_option("--draws", draws);
    lax_cmd->add_option("--seed", seed);

    auto* self_cmd = app.add_subcommand("selftest", "Run the invariant suite");
    add_common(self_cmd, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*coeffs)
            return cmd_coeffs(cfg, n_max, out);
        if (*connect_cmd)
            return cmd_connect(cfg, out);
        if (*integrate_cmd)
            return cmd_integrate(cfg, spacing, out);
        if (*verify_cmd)
            return cmd_verify(cfg, out);
        if (*scan_cmd) {
            if (scan_cmd->count("--x-end") == 0)
                cfg.x_end = -60.0;
            return cmd_scan(cfg, grid, x_max, out);
        }
        if (*lax_cmd)
            return cmd_laxcheck(cfg, lambda, draws, seed, out);
        if (*self_cmd)
            return cmd_selftest(cfg, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PoleError& e) {
        err << "pole: " << e.what() << '\n';
        return kExitPole;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace pii::cli
