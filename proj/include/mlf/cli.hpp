#pragma once

// Command-line front end. `run` never calls exit(), so the whole CLI can be
// driven in-process from tests.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or domain error,
// 3 z outside the sector where the Plana integrals converge.

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlf/asymptotics.hpp"
#include "mlf/holonomy.hpp"
#include "mlf/laplace.hpp"
#include "mlf/order.hpp"
#include "mlf/plana.hpp"
#include "mlf/series.hpp"
#include "mlf/sweep.hpp"

namespace mlf::cli {

enum ExitCode : int { ok = 0, numerical_failure = 1, usage = 2, sector = 3 };

/// Largest peak index for which `--method auto` still sums the series.
inline constexpr double auto_series_limit = 1e4;

/// "re,im", "re", or "mod@argdeg".
inline Complex parse_z(const std::string& text)
{
    auto number = [&text](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size())
                return v;
        } catch (const std::exception&) {
        }
        throw UsageError("cannot parse z from '" + text + "'");
    };
    if (auto at = text.find('@'); at != std::string::npos) {
        const double mod = number(text.substr(0, at));
        const double deg = number(text.substr(at + 1));
        if (mod < 0.0)
            throw UsageError("z: modulus must be non-negative");
        return std::polar(mod, deg * pi / 180.0);
    }
    if (auto comma = text.find(','); comma != std::string::npos)
        return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
    return {number(text), 0.0};
}

inline Method parse_method(const std::string& s)
{
    if (s == "series")
        return Method::Series;
    if (s == "plana")
        return Method::Plana;
    if (s == "asymptotic")
        return Method::Asymptotic;
    throw UsageError("unknown method '" + s + "'");
}

inline void print_result(std::ostream& out, const EvalResult& r)
{
    using detail::format_double;
    const Complex m = r.value.mantissa();
    out << "method: " << to_string(r.method) << '\n';
    out << "mantissa: " << format_double(m.real()) << ' ' << format_double(m.imag()) << '\n';
    out << "log_scale: " << format_double(r.value.log_scale()) << '\n';
    if (r.value.representable()) {
        const Complex v = r.value.to_complex();
        out << "value: " << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
    } else {
        out << "value: overflow\n";
    }
    out << "work: " << r.work << '\n';
    out << "err_estimate: " << format_double(r.err_estimate) << '\n';
}

namespace detail {

struct ParamFlags {
    double a = 1.0, b = 1.0, alpha = 1.0;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--a", a, "a > 0")->required();
        cmd->add_option("--b", b, "b > 0")->required();
        cmd->add_option("--alpha", alpha, "alpha > 0")->required();
    }
    Params params() const { return Params(a, b, alpha); }
};

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Generalized Mittag-Leffler function F_{a,b}^(alpha)(z) = sum z^n / Gamma(a n + b)^alpha"};
    app.require_subcommand(1);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate F at a single point");
    detail::ParamFlags eval_params;
    eval_params.attach(eval);
    std::string z_text, method_text = "auto";
    double eval_tol = 0.0;
    eval->add_option("--z", z_text, "re,im | re | mod@argdeg")->required();
    eval->add_option("--method", method_text, "series | plana | asymptotic | auto")->capture_default_str();
    eval->add_option("--tol", eval_tol, "relative tolerance (default per method)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "compare methods over a polar grid");
    detail::ParamFlags sweep_params;
    sweep_params.attach(sweep);
    std::vector<double> mods, args;
    std::string out_path, format = "csv";
    SweepOptions sweep_opts;
    sweep->add_option("--mods", mods, "moduli |z|")->required()->delimiter(',');
    sweep->add_option("--args", args, "arguments in radians, (-pi, pi]")->required()->delimiter(',');
    sweep->add_option("--tol", sweep_opts.tol)->capture_default_str();
    sweep->add_option("--eps", sweep_opts.eps, "sector slack for the in_sector flag")->capture_default_str();
    sweep->add_option("--out", out_path, "output file (stdout if omitted)");
    sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    // laplace
    auto* laplace = app.add_subcommand("laplace", "check the Laplace relation at real z > 0");
    double laplace_alpha = 1.0, laplace_tol = 1e-9;
    std::vector<std::string> laplace_z;
    laplace->add_option("--alpha", laplace_alpha)->required();
    laplace->add_option("--z", laplace_z, "real points")->required()->delimiter(',');
    laplace->add_option("--tol", laplace_tol)->capture_default_str();

    // order
    auto* order = app.add_subcommand("order", "estimate the order of growth");
    detail::ParamFlags order_params;
    order_params.attach(order);
    std::vector<double> radii;
    order->add_option("--radii", radii, "real radii > 1")->required()->delimiter(',');

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "search for recurrences satisfied by n!^alpha");
    double probe_alpha = 1.0;
    int max_order = 2, max_degree = 2;
    ProbeSettings probe_settings;
    std::string probe_format = "text";
    probe_cmd->add_option("--alpha", probe_alpha)->required();
    probe_cmd->add_option("--max-order", max_order)->capture_default_str();
    probe_cmd->add_option("--max-degree", max_degree)->capture_default_str();
    probe_cmd->add_option("--window-start", probe_settings.window.start)->capture_default_str();
    probe_cmd->add_option("--window-len", probe_settings.window.length)->capture_default_str();
    probe_cmd->add_option("--threshold", probe_settings.threshold)->capture_default_str();
    probe_cmd->add_option("--format", probe_format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }

    using mlf::detail::format_double;
    try {
        if (*eval) {
            const Params p = eval_params.params();
            const Complex z = parse_z(z_text);
            EvalResult r;
            Method m;
            if (method_text == "auto") {
                m = peak_index(p, z) <= auto_series_limit ? Method::Series : Method::Asymptotic;
                if (m == Method::Asymptotic && !in_sector(p, z, 0.0))
                    err << "warning: z lies outside the sector where the asymptotic formula holds\n";
            } else {
                m = parse_method(method_text);
            }
            switch (m) {
            case Method::Series:
                r = eval_tol > 0 ? eval_series(p, z, eval_tol) : eval_series(p, z);
                break;
            case Method::Plana:
                r = eval_tol > 0 ? eval_plana(p, z, eval_tol) : eval_plana(p, z);
                break;
            case Method::Asymptotic:
                r = eval_asymptotic(p, z);
                break;
            }
            print_result(out, r);
            if (r.failed()) {
                err << "error: series did not converge within " << series_term_cap << " terms\n";
                return numerical_failure;
            }
        } else if (*sweep) {
            const auto rows = run_sweep(sweep_params.params(), mods, args, sweep_opts);
            std::ofstream file;
            if (!out_path.empty()) {
                file.open(out_path);
                if (!file)
                    throw UsageError("cannot open '" + out_path + "' for writing");
            }
            std::ostream& dst = out_path.empty() ? out : file;
            if (format == "csv")
                write_csv(dst, rows);
            else
                dst << to_json(rows).dump(2) << '\n';
            dst.flush();
            if (!dst)
                throw UsageError("write to '" + out_path + "' failed");
        } else if (*laplace) {
            for (const std::string& s : laplace_z) {
                const Complex z = parse_z(s);
                if (z.imag() != 0.0)
                    throw DomainError("laplace: z must be real");
                const double res = laplace_residual(laplace_alpha, z.real(), laplace_tol);
                out << format_double(laplace_alpha) << ' ' << format_double(z.real()) << ' '
                    << format_double(res) << '\n';
            }
        } else if (*order) {
            const Params p = order_params.params();
            const OrderEstimate e = estimate_order(p, radii);
            out << "slope: " << format_double(e.slope) << '\n';
            out << "reference: " << format_double(e.reference) << '\n';
        } else if (*probe_cmd) {
            const auto outcomes = probe_grid(probe_alpha, max_order, max_degree, probe_settings);
            if (probe_format == "json") {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& o : outcomes) {
                    nlohmann::json row{{"order", o.hypothesis.order},
                                       {"degree", o.hypothesis.degree},
                                       {"sigma_ratio", o.sigma_ratio},
                                       {"found", o.candidate.has_value()}};
                    if (o.candidate) {
                        row["holdout_residual"] = o.candidate->holdout_residual;
                        row["recurrence"] = describe(*o.candidate);
                    }
                    j.push_back(std::move(row));
                }
                out << j.dump(2) << '\n';
            } else {
                for (const auto& o : outcomes) {
                    out << "r=" << o.hypothesis.order << " d=" << o.hypothesis.degree << ' '
                        << (o.candidate ? "found" : "empty") << " sigma_ratio=" << format_double(o.sigma_ratio);
                    if (o.candidate)
                        out << " holdout=" << format_double(o.candidate->holdout_residual) << "  "
                            << describe(*o.candidate);
                    out << '\n';
                }
            }
        }
    } catch (const SectorError& e) {
        err << "sector error: " << e.what() << '\n';
        return sector;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return usage;
    } catch (const QuadratureError& e) {
        err << "quadrature error: " << e.what() << '\n';
        return numerical_failure;
    }
    return ok;
}

} // namespace mlf::cli
