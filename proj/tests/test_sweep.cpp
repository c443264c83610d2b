#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "mlf/sweep.hpp"

using namespace mlf;

namespace {

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

void check_identical(const SweepRow& x, const SweepRow& y)
{
    CHECK(same_bits(x.a, y.a));
    CHECK(same_bits(x.b, y.b));
    CHECK(same_bits(x.alpha, y.alpha));
    CHECK(same_bits(x.z_mod, y.z_mod));
    CHECK(same_bits(x.z_arg, y.z_arg));
    CHECK(same_bits(x.z_re, y.z_re));
    CHECK(same_bits(x.z_im, y.z_im));
    CHECK(x.series == y.series);
    CHECK(same_bits(x.series_err, y.series_err));
    CHECK(x.asymptotic == y.asymptotic);
    CHECK(x.plana == y.plana);
    CHECK(same_bits(x.dev_series_asymptotic, y.dev_series_asymptotic));
    CHECK(x.dev_series_plana.has_value() == y.dev_series_plana.has_value());
    if (x.dev_series_plana && y.dev_series_plana)
        CHECK(same_bits(*x.dev_series_plana, *y.dev_series_plana));
    CHECK(x.in_sector == y.in_sector);
    CHECK(same_bits(x.plana_margin, y.plana_margin));
}

} // namespace

TEST_CASE("sweep over the exponential", "[sweep]")
{
    const auto rows = run_sweep(Params(1, 1, 1), {10.0, 100.0}, {0.0, pi / 4});
    REQUIRE(rows.size() == 4);
    // modulus-major ordering
    CHECK(rows[0].z_mod == 10.0);
    CHECK(rows[1].z_arg == pi / 4);
    CHECK(rows[2].z_mod == 100.0);
    for (const auto& r : rows) {
        CHECK(r.in_sector);
        REQUIRE(r.plana.has_value());
        // Here the asymptotic formula is exactly e^z, so both deviations measure
        // the rounding of the other method, amplified by cancellation between
        // terms: e^{|z| (1 - cos arg z)}.
        const double bound = 1e-13 * std::exp(r.z_mod * (1.0 - std::cos(r.z_arg)));
        CHECK(r.dev_series_asymptotic < bound);
        CHECK(*r.dev_series_plana < bound);
    }
}

TEST_CASE("sweep deviation from the asymptotic shrinks with |z|", "[sweep]")
{
    const auto rows = run_sweep(Params(1, 1, 2), {10.0, 100.0, 1000.0}, {0.0, 0.3});
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 2; i < rows.size(); ++i)
        CHECK(rows[i].dev_series_asymptotic < rows[i - 2].dev_series_asymptotic);
}

TEST_CASE("sweep flags rows outside the real-axis-only sector", "[sweep]")
{
    const auto rows = run_sweep(Params(1, 1, 4), {5.0, 50.0}, {0.3});
    for (const auto& r : rows) {
        CHECK(!r.in_sector);
        CHECK(!r.plana.has_value());  // margin is negative
        CHECK(r.plana_margin < 0.0);
    }
}

TEST_CASE("sweep input validation", "[sweep]")
{
    CHECK_THROWS_AS(run_sweep(Params(1, 1, 1), {10.0}, {}), UsageError);
    CHECK_THROWS_AS(run_sweep(Params(1, 1, 1), {}, {0.0}), UsageError);
    CHECK_THROWS_AS(run_sweep(Params(1, 1, 1), {10.0}, {-pi}), UsageError);
    CHECK_THROWS_AS(run_sweep(Params(1, 1, 1), {10.0}, {3.5}), UsageError);
    CHECK_THROWS_AS(run_sweep(Params(1, 1, 1), {0.0}, {0.0}), UsageError);
    CHECK_NOTHROW(run_sweep(Params(1, 1, 1), {1.0}, {pi}));
}

TEST_CASE("sweep output does not depend on the thread count", "[sweep]")
{
    const Params p(0.8, 1.2, 1.1);
    const std::vector<double> mods = {3.0, 30.0, 80.0}, args = {-2.0, -0.5, 0.0, 1.0, 3.0};
    SweepOptions one, many;
    one.threads = 1;
    many.threads = 4;
    std::ostringstream a, b;
    write_csv(a, run_sweep(p, mods, args, one));
    write_csv(b, run_sweep(p, mods, args, many));
    CHECK(a.str() == b.str());
}

TEST_CASE("MLX_THREADS caps the worker count", "[sweep]")
{
    ::setenv("MLX_THREADS", "3", 1);
    CHECK(default_thread_count() == 3);
    ::setenv("MLX_THREADS", "zero", 1);
    CHECK(default_thread_count() >= 1);
    ::unsetenv("MLX_THREADS");
}

TEST_CASE("CSV round trip is bit exact", "[sweep][property]")
{
    const auto rows = run_sweep(Params(0.5, 1.5, 1.5), {2.0, 25.0, 400.0}, {-3.0, -1.0, 0.0, 0.7, pi});
    std::stringstream csv;
    write_csv(csv, rows);
    const std::string first = csv.str();
    CHECK(first.rfind("a,b,alpha,z_mod,z_arg", 0) == 0);

    const auto back = read_csv(csv);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        check_identical(rows[i], back[i]);

    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == first);
}

TEST_CASE("CSV reader rejects malformed input", "[sweep]")
{
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), UsageError);
    std::istringstream header("x,y\n");
    CHECK_THROWS_AS(read_csv(header), UsageError);
}

TEST_CASE("JSON mirrors the CSV columns", "[sweep]")
{
    const auto rows = run_sweep(Params(1, 1, 4), {5.0}, {0.0, 0.3});
    const auto j = to_json(rows);
    REQUIRE(j.size() == 2);
    for (const auto& col : sweep_columns())
        CHECK(j[0].contains(col));
    CHECK(j[0].size() == sweep_columns().size());
    CHECK(j[1]["plana_mantissa_re"].is_null());
    CHECK(j[0]["in_sector"] == true);
}
