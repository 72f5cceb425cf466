#include <doctest.h>

#include <cmath>

#include "batopt/bench.hpp"
#include "batopt/errors.hpp"
#include "batopt/params_io.hpp"
#include "test_util.hpp"

using namespace batopt;

namespace {

MeasuredSeries series(AgingAxis axis, std::vector<AgingPoint> pts) {
  MeasuredSeries s;
  s.axis = axis;
  s.points = std::move(pts);
  return s;
}

AgingProtocol calendar(double soc, double t_k, double days, double checkup) {
  AgingProtocol p;
  p.kind = AgingProtocol::Kind::calendar;
  p.soc = soc;
  p.temperature_k = t_k;
  p.duration_days = days;
  p.checkup_days = checkup;
  return p;
}

AgingProtocol cycling(double lo, double hi, double rate, int n, int checkup) {
  AgingProtocol p;
  p.kind = AgingProtocol::Kind::cycle;
  p.temperature_k = 318.15;
  p.soc_lo = lo;
  p.soc_hi = hi;
  p.charge_rate_c = rate;
  p.n_cycles = n;
  p.checkup_cycles = checkup;
  return p;
}

std::vector<BenchModel> all_models() {
  return {{"bucket", ModelSetup::bucket(default_bucket_params())},
          {"ecm", ModelSetup::ecm(default_ecm_params())},
          {"spm", ModelSetup::spm(default_spm_params())}};
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("rmse examples") {
    auto a = series(AgingAxis::days, {{0, 1.0}, {10, 0.97}, {20, 0.95}});
    CHECK(rmse(a, a) == 0.0);
    auto off = series(AgingAxis::days, {{0, 0.95}, {10, 0.92}, {20, 0.90}});
    CHECK(rmse(a, off) == doctest::Approx(5.0).epsilon(1e-12));
    auto sim = series(AgingAxis::days, {{0, 1.0}, {10, 1.0}});
    auto meas = series(AgingAxis::days, {{0, 0.97}, {10, 0.96}});
    CHECK(rmse(sim, meas) == doctest::Approx(3.5355339059327378).epsilon(1e-12));
  }

  TEST_CASE("rmse interpolates between checkups and is symmetric on shared points") {
    auto sim = series(AgingAxis::full_cycles, {{0, 1.0}, {100, 0.9}});
    auto meas = series(AgingAxis::full_cycles, {{50, 0.95}});
    CHECK(rmse(sim, meas) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    auto x = series(AgingAxis::days, {{0, 1.0}, {5, 0.98}, {9, 0.97}});
    auto y = series(AgingAxis::days, {{0, 0.99}, {5, 0.985}, {9, 0.95}});
    CHECK(rmse(x, y) == doctest::Approx(rmse(y, x)).epsilon(1e-15));
  }

  TEST_CASE("rmse refuses extrapolation and axis mismatch") {
    auto sim = series(AgingAxis::days, {{0, 1.0}, {30, 0.99}});
    CHECK_THROWS_AS(rmse(sim, series(AgingAxis::days, {{45, 0.98}})), ExtrapolationError);
    CHECK_THROWS_AS(rmse(sim, series(AgingAxis::full_cycles, {{10, 0.98}})), ConfigError);
  }

  TEST_CASE("bucket calendar aging is flat") {
    MeasuredSeries s = run_protocol(calendar(0.9, 318.15, 240, 30), ModelSetup::bucket(default_bucket_params()));
    CHECK(s.axis == AgingAxis::days);
    REQUIRE(s.points.size() == 9);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      CHECK(s.points[i].axis == doctest::Approx(30.0 * static_cast<double>(i)));
      CHECK(s.points[i].relative_capacity == 1.0);
    }
  }

  TEST_CASE("zero-duration protocol is a single fresh point") {
    for (auto m : all_models()) {
      MeasuredSeries s = run_protocol(calendar(0.5, 298.15, 0, 30), m.setup);
      REQUIRE(s.points.size() == 1);
      CHECK(s.points[0].axis == 0.0);
      CHECK(s.points[0].relative_capacity == 1.0);
    }
  }

  TEST_CASE("SPM calendar fade is faster when hot") {
    auto m = ModelSetup::spm(default_spm_params());
    MeasuredSeries cold = run_protocol(calendar(0.5, 298.15, 60, 30), m);
    MeasuredSeries hot = run_protocol(calendar(0.5, 318.15, 60, 30), m);
    CHECK(hot.points.back().relative_capacity < cold.points.back().relative_capacity);
    CHECK(cold.points.back().relative_capacity < 1.0);
  }

  TEST_CASE("cycle protocols report full cycles and lose capacity") {
    for (auto m : all_models()) {
      MeasuredSeries s = run_protocol(cycling(0.2, 0.8, 1.0, 40, 20), m.setup);
      CHECK(s.axis == AgingAxis::full_cycles);
      REQUIRE(s.points.size() == 3);
      // each cycle moves 0.6 of the capacity twice
      CHECK(s.points[1].axis == doctest::Approx(20 * 0.6).epsilon(0.05));
      CHECK(s.points.back().relative_capacity <= 1.0);
    }
    MeasuredSeries e = run_protocol(cycling(0.2, 0.8, 1.0, 40, 20), ModelSetup::ecm(default_ecm_params()));
    CHECK(e.points.back().relative_capacity < 1.0);
  }

  TEST_CASE("unreachable SoC window is a protocol error") {
    CHECK_THROWS_AS(run_protocol(cycling(0.2, 0.99, 1.0, 10, 5), ModelSetup::ecm(default_ecm_params())),
                    ProtocolError);
  }

  TEST_CASE("protocol runs are deterministic") {
    auto m = ModelSetup::ecm(default_ecm_params());
    auto p = cycling(0.2, 0.8, 1.0, 30, 10);
    MeasuredSeries a = run_protocol(p, m), b = run_protocol(p, m);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].axis == b.points[i].axis);
      CHECK(a.points[i].relative_capacity == b.points[i].relative_capacity);
    }
  }

  TEST_CASE("series and protocol files round-trip") {
    testutil::TempDir d("bench");
    auto s = series(AgingAxis::full_cycles, {{0, 1.0}, {12.5, 0.987654321}, {25, 0.97}});
    write_measured(s, d / "x.csv");
    MeasuredSeries t = load_measured(d / "x.csv");
    CHECK(t.axis == s.axis);
    REQUIRE(t.points.size() == 3);
    CHECK(t.points[1].relative_capacity == s.points[1].relative_capacity);
    auto p = cycling(0.1, 0.7, 0.5, 500, 100);
    write_protocol(p, d / "x.json");
    AgingProtocol q = load_protocol(d / "x.json");
    CHECK(q.kind == p.kind);
    CHECK(q.soc_lo == p.soc_lo);
    CHECK(q.charge_rate_c == p.charge_rate_c);
    CHECK(q.n_cycles == p.n_cycles);
    testutil::write_text(d / "bad.csv", "axis,value,relative_capacity\ndays,10,0.9\ndays,5,0.95\n");
    CHECK_THROWS(load_measured(d / "bad.csv"));
  }

  TEST_CASE("table marks missing data n/a and averages the rest") {
    std::vector<BenchDataset> ds(2);
    ds[0].name = "cal";
    ds[0].protocol = calendar(0.5, 298.15, 60, 30);
    ds[0].measured = series(AgingAxis::days, {{0, 1.0}, {30, 0.99}, {60, 0.98}});
    ds[1].name = "nodata";
    ds[1].protocol = calendar(0.5, 298.15, 60, 30);
    std::vector<BenchModel> models{{"bucket", ModelSetup::bucket(default_bucket_params())}};
    BenchTable t = benchmark_table(ds, models);
    REQUIRE(t.rmse.size() == 1);
    REQUIRE(t.rmse[0][0].has_value());
    CHECK_FALSE(t.rmse[0][1].has_value());
    CHECK(*t.average[0] == *t.rmse[0][0]);
    CHECK(*t.rmse[0][0] == doctest::Approx(100.0 * std::sqrt((0.0001 + 0.0004) / 3.0)).epsilon(1e-12));
    std::string csv = t.to_csv();
    CHECK(csv.rfind("model,cal,nodata,average\n", 0) == 0);
    CHECK(csv.find("n/a") != std::string::npos);
  }

  TEST_CASE("permuting models permutes rows only") {
    std::vector<BenchDataset> ds(1);
    ds[0].name = "cyc";
    ds[0].protocol = cycling(0.2, 0.8, 1.0, 20, 10);
    ds[0].measured = series(AgingAxis::full_cycles, {{0, 1.0}, {10, 0.995}});
    std::vector<BenchModel> fwd{{"bucket", ModelSetup::bucket(default_bucket_params())},
                                {"ecm", ModelSetup::ecm(default_ecm_params())}};
    std::vector<BenchModel> rev{fwd[1], fwd[0]};
    BenchTable a = benchmark_table(ds, fwd), b = benchmark_table(ds, rev);
    CHECK(a.models[0] == b.models[1]);
    CHECK(*a.rmse[0][0] == *b.rmse[1][0]);
    CHECK(*a.rmse[1][0] == *b.rmse[0][0]);
  }

  TEST_CASE("shipped synthetic fixture is reproduced by the generating model") {
    auto ds = load_datasets(data_dir() / "bench");
    REQUIRE(ds.size() == 4);
    BenchTable t = benchmark_table(ds, all_models());
    REQUIRE(t.models == std::vector<std::string>{"bucket", "ecm", "spm"});
    for (std::size_t j = 0; j < ds.size(); ++j) {
      REQUIRE(t.rmse[2][j].has_value());
      CHECK(*t.rmse[2][j] < 0.5);
      REQUIRE(t.rmse[0][j].has_value());
      CHECK(*t.rmse[0][j] > 0.0);
      if (ds[j].protocol.kind == AgingProtocol::Kind::calendar) {
        MeasuredSeries b = run_protocol(ds[j].protocol, ModelSetup::bucket(default_bucket_params()));
        for (const auto& p : b.points) CHECK(p.relative_capacity == 1.0);
      }
    }
  }
}
