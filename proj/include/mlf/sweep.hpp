#pragma once

// Cross-method sweep over a polar grid of z, with CSV and JSON emission.

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mlf/asymptotics.hpp"
#include "mlf/plana.hpp"
#include "mlf/series.hpp"

namespace mlf {

struct SweepRow {
    double a = 0, b = 0, alpha = 0;
    double z_mod = 0, z_arg = 0;
    double z_re = 0, z_im = 0;
    ScaledComplex series;
    double series_err = 0;
    ScaledComplex asymptotic;
    std::optional<ScaledComplex> plana;
    double dev_series_asymptotic = 0;
    std::optional<double> dev_series_plana;
    bool in_sector = false;
    double plana_margin = 0;
};

struct SweepOptions {
    double tol = 1e-12;
    double eps = 0.0;
    /// 0 means: MLX_THREADS if set, else hardware concurrency.
    unsigned threads = 0;
};

/// Worker count: MLX_THREADS (if a positive integer) caps hardware concurrency.
inline unsigned default_thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MLX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            n = unsigned(v);
    }
    return n;
}

inline SweepRow sweep_point(const Params& p, double mod, double arg, const SweepOptions& opts)
{
    SweepRow row;
    row.a = p.a();
    row.b = p.b();
    row.alpha = p.alpha();
    row.z_mod = mod;
    row.z_arg = arg;
    const Complex z = std::polar(mod, arg);
    row.z_re = z.real();
    row.z_im = z.imag();

    const EvalResult s = eval_series(p, z, opts.tol);
    row.series = s.value;
    row.series_err = s.err_estimate;
    row.asymptotic = eval_asymptotic(p, z).value;
    row.dev_series_asymptotic = relative_deviation(row.asymptotic, row.series);
    row.in_sector = in_sector(p, z, opts.eps);
    row.plana_margin = plana_convergence_margin(p, z);
    if (row.plana_margin > plana_min_margin) {
        try {
            row.plana = eval_plana(p, z, std::max(opts.tol, 1e-13)).value;
            row.dev_series_plana = relative_deviation(*row.plana, row.series);
        } catch (const QuadratureError&) {
            // left empty: the quadrature could not resolve this point
        }
    }
    return row;
}

/// One row per (modulus, argument), modulus-major. Rows are computed in
/// parallel; the output order depends only on the grid.
inline std::vector<SweepRow> run_sweep(const Params& p, const std::vector<double>& mods,
                                       const std::vector<double>& args, const SweepOptions& opts = {})
{
    if (mods.empty() || args.empty())
        throw UsageError("sweep: modulus and argument grids must be non-empty");
    for (double m : mods)
        if (!(m > 0.0) || !std::isfinite(m))
            throw UsageError("sweep: moduli must be finite and positive");
    for (double t : args)
        if (!(t > -pi && t <= pi))
            throw UsageError("sweep: arguments must lie in (-pi, pi]");

    const std::size_t total = mods.size() * args.size();
    std::vector<SweepRow> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                rows[i] = sweep_point(p, mods[i / args.size()], args[i % args.size()], opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::min<std::size_t>(opts.threads ? opts.threads : default_thread_count(), total);
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

inline const std::vector<std::string>& sweep_columns()
{
    static const std::vector<std::string> cols = {
        "a",
        "b",
        "alpha",
        "z_mod",
        "z_arg",
        "z_re",
        "z_im",
        "series_mantissa_re",
        "series_mantissa_im",
        "series_log_scale",
        "series_err",
        "asymptotic_mantissa_re",
        "asymptotic_mantissa_im",
        "asymptotic_log_scale",
        "plana_mantissa_re",
        "plana_mantissa_im",
        "plana_log_scale",
        "dev_series_asymptotic",
        "dev_series_plana",
        "in_sector",
        "plana_margin",
    };
    return cols;
}

namespace detail {

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw UsageError("sweep csv: bad number '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

// Fields in column order; empty string for absent optionals.
inline std::vector<std::string> row_fields(const SweepRow& r)
{
    std::vector<std::string> f;
    auto num = [&f](double v) { f.push_back(format_double(v)); };
    num(r.a);
    num(r.b);
    num(r.alpha);
    num(r.z_mod);
    num(r.z_arg);
    num(r.z_re);
    num(r.z_im);
    num(r.series.mantissa().real());
    num(r.series.mantissa().imag());
    num(r.series.log_scale());
    num(r.series_err);
    num(r.asymptotic.mantissa().real());
    num(r.asymptotic.mantissa().imag());
    num(r.asymptotic.log_scale());
    if (r.plana) {
        num(r.plana->mantissa().real());
        num(r.plana->mantissa().imag());
        num(r.plana->log_scale());
    } else {
        f.insert(f.end(), 3, "");
    }
    num(r.dev_series_asymptotic);
    if (r.dev_series_plana)
        num(*r.dev_series_plana);
    else
        f.emplace_back();
    f.push_back(r.in_sector ? "true" : "false");
    num(r.plana_margin);
    return f;
}

// Scaled values are already normalized; rebuild them without renormalizing so
// that a write/read cycle is bit-exact.
inline ScaledComplex scaled_from_fields(double re, double im, double log_scale)
{
    return ScaledComplex(Complex(re, im), log_scale);
}

} // namespace detail

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const SweepRow& r : rows) {
        const auto f = detail::row_fields(r);
        for (std::size_t i = 0; i < f.size(); ++i)
            out << (i ? "," : "") << f[i];
        out << '\n';
    }
}

inline std::vector<SweepRow> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw UsageError("sweep csv: missing header");
    if (detail::split_csv_line(line) != sweep_columns())
        throw UsageError("sweep csv: unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != sweep_columns().size())
            throw UsageError("sweep csv: wrong field count");
        auto d = [&f](std::size_t i) { return detail::parse_double(f[i]); };
        SweepRow r;
        r.a = d(0);
        r.b = d(1);
        r.alpha = d(2);
        r.z_mod = d(3);
        r.z_arg = d(4);
        r.z_re = d(5);
        r.z_im = d(6);
        r.series = detail::scaled_from_fields(d(7), d(8), d(9));
        r.series_err = d(10);
        r.asymptotic = detail::scaled_from_fields(d(11), d(12), d(13));
        if (!f[14].empty())
            r.plana = detail::scaled_from_fields(d(14), d(15), d(16));
        r.dev_series_asymptotic = d(17);
        if (!f[18].empty())
            r.dev_series_plana = d(18);
        if (f[19] != "true" && f[19] != "false")
            throw UsageError("sweep csv: bad in_sector flag");
        r.in_sector = f[19] == "true";
        r.plana_margin = d(20);
        rows.push_back(r);
    }
    return rows;
}

inline nlohmann::json to_json(const std::vector<SweepRow>& rows)
{
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v))
            return v;
        return detail::format_double(v);  // JSON has no inf/nan
    };
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow& r : rows) {
        nlohmann::json o;
        o["a"] = r.a;
        o["b"] = r.b;
        o["alpha"] = r.alpha;
        o["z_mod"] = r.z_mod;
        o["z_arg"] = r.z_arg;
        o["z_re"] = r.z_re;
        o["z_im"] = r.z_im;
        o["series_mantissa_re"] = r.series.mantissa().real();
        o["series_mantissa_im"] = r.series.mantissa().imag();
        o["series_log_scale"] = r.series.log_scale();
        o["series_err"] = num(r.series_err);
        o["asymptotic_mantissa_re"] = r.asymptotic.mantissa().real();
        o["asymptotic_mantissa_im"] = r.asymptotic.mantissa().imag();
        o["asymptotic_log_scale"] = r.asymptotic.log_scale();
        o["plana_mantissa_re"] = r.plana ? nlohmann::json(r.plana->mantissa().real()) : nlohmann::json();
        o["plana_mantissa_im"] = r.plana ? nlohmann::json(r.plana->mantissa().imag()) : nlohmann::json();
        o["plana_log_scale"] = r.plana ? nlohmann::json(r.plana->log_scale()) : nlohmann::json();
        o["dev_series_asymptotic"] = num(r.dev_series_asymptotic);
        o["dev_series_plana"] = r.dev_series_plana ? num(*r.dev_series_plana) : nlohmann::json();
        o["in_sector"] = r.in_sector;
        o["plana_margin"] = r.plana_margin;
        out.push_back(std::move(o));
    }
    return out;
}

} // namespace mlf
