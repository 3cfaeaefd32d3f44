#include <doctest.h>

#include <sstream>

#include "becca/csv.hpp"
#include "becca/diagnostics.hpp"
#include "test_util.hpp"

using namespace becca;

namespace {

MatrixXd iid(Index n, Index chains, std::uint64_t seed, double shift = 0.0) {
  RngStream rng(seed, 0);
  MatrixXd m(n, chains);
  for (Index c = 0; c < chains; ++c)
    for (Index i = 0; i < n; ++i) m(i, c) = rng.normal() + shift * c;
  return m;
}

MatrixXd ar1(Index n, Index chains, double phi, std::uint64_t seed) {
  MatrixXd m(n, chains);
  for (Index c = 0; c < chains; ++c) {
    RngStream rng(seed, static_cast<std::uint64_t>(c));
    double x = rng.normal() / std::sqrt(1 - phi * phi);
    for (Index i = 0; i < n; ++i) {
      x = phi * x + rng.normal();
      m(i, c) = x;
    }
  }
  return m;
}

DrawMatrix small_draws() {
  DrawMatrix dm;
  dm.names = {"a", "b"};
  for (int c = 0; c < 2; ++c) {
    ChainDraws ch;
    ch.values.resize(10, 2);
    for (Index i = 0; i < 10; ++i) {
      ch.values(i, 0) = 0.1 * i + c;
      ch.values(i, 1) = -1.0 / (i + 1 + c);
    }
    ch.stats.resize(10);
    dm.chains.push_back(ch);
  }
  return dm;
}

}  // namespace

TEST_CASE("split_rhat") {
  const MatrixXd one = iid(2000, 1, 1);
  MatrixXd two(1000, 2);
  two.col(0) = one.col(0).head(1000);
  two.col(1) = one.col(0).tail(1000);
  CHECK(split_rhat(two).value < 1.01);

  CHECK(split_rhat(iid(1000, 2, 2, 10.0)).value > 3.0);

  const auto constant = split_rhat(MatrixXd::Constant(100, 3, 2.5));
  CHECK(constant.value == 1.0);
  CHECK(constant.degenerate);
}

TEST_CASE("split_rhat closed form on a tiny input") {
  MatrixXd m(4, 1);
  m << 1, 2, 3, 5;
  // Halves {1,2} and {3,5}: W = (0.5 + 2)/2, B = 2 * var(1.5, 4).
  const double n = 2, w = 1.25, b = n * 3.125;
  const double expected = std::sqrt(((n - 1) / n * w + b / n) / w);
  CHECK(split_rhat(m).value == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("ess_bulk") {
  const double e = ess_bulk(iid(1000, 4, 3)).value;
  CHECK(e >= 2800);
  CHECK(e <= 4000);

  const MatrixXd chain = ar1(20000, 1, 0.9, 4);
  const double expected = 20000 * 0.1 / 1.9;
  const double got = ess_bulk(chain).value;
  CHECK(got > expected / 1.5);
  CHECK(got < expected * 1.5);

  const auto constant = ess_bulk(MatrixXd::Constant(100, 2, 1.0));
  CHECK(constant.value == 0.0);
  CHECK(constant.degenerate);
  CHECK(ess_bulk(iid(50, 2, 9)).value <= 100.0);
}

TEST_CASE("diagnostics are affine- and permutation-invariant") {
  RngStream rng(5, 0);
  for (int rep = 0; rep < 10; ++rep) {
    MatrixXd m = ar1(200, 4, 0.5, 10 + rep);
    m.col(1).array() += 0.3 * rng.normal();
    const double a = rng.uniform(-5, 5), b = rng.uniform(0.1, 4) * (rep % 2 ? -1 : 1);
    const MatrixXd mapped = (m.array() * b + a).matrix();
    CHECK(split_rhat(mapped).value == doctest::Approx(split_rhat(m).value).epsilon(1e-10));
    MatrixXd perm(m.rows(), 4);
    perm << m.col(2), m.col(0), m.col(3), m.col(1);
    CHECK(split_rhat(perm).value == doctest::Approx(split_rhat(m).value).epsilon(1e-12));
    CHECK(ess_bulk(perm).value == doctest::Approx(ess_bulk(m).value).epsilon(1e-10));
  }
}

TEST_CASE("quantile interpolates between order statistics") {
  VectorXd v(5);
  v << 5, 1, 4, 2, 3;
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 5.0);
  CHECK(quantile(v, 0.5) == 3.0);
  CHECK(quantile(v, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("report invariants") {
  const DrawMatrix dm = small_draws();
  const DiagnosticsReport r = diagnose(dm);
  REQUIRE(r.parameters.size() == 2);
  for (const auto& p : r.parameters) {
    CHECK(p.q025 <= p.q50);
    CHECK(p.q50 <= p.q975);
    CHECK(p.ess_bulk <= 20.0);
  }
  CHECK(r.total_draws == 20);
  const std::string text = r.to_text();
  CHECK(text.find("a") != std::string::npos);
  CHECK(text.find("rhat") != std::string::npos);
}

TEST_CASE("rhat share counts converged and degenerate parameters") {
  DiagnosticsReport r;
  auto add = [&](const std::string& name, double rhat, bool degenerate) {
    ParameterSummary p;
    p.name = name;
    p.rhat = rhat;
    p.degenerate = degenerate;
    r.parameters.push_back(p);
  };
  add("beta[1]", 1.01, false);
  add("beta[2]", 1.2, false);
  add("beta[3]", 0.0, true);
  add("beta[4]", 1.05, false);
  add("g", 3.0, false);
  CHECK(r.rhat_share("beta[", 1.05) == doctest::Approx(0.75));
  CHECK(r.rhat_share("g", 1.05) == 0.0);
  CHECK(std::isnan(r.rhat_share("tau", 1.05)));
  CHECK(r.max_rhat("beta[") == 1.2);
}

TEST_CASE("trace export") {
  DrawMatrix dm = small_draws();
  const std::string one = trace_csv(dm, {"b"});
  const CsvTable t = parse_csv(one);
  CHECK(t.header == std::vector<std::string>{"chain", "iteration", "parameter", "value"});
  CHECK(t.rows.size() == 20);
  for (const auto& row : t.rows) {
    const int c = std::stoi(row[0]) - 1, i = std::stoi(row[1]) - 1;
    CHECK(row[2] == "b");
    CHECK(std::stod(row[3]) == dm.chains[c].values(i, 1));
  }
  CHECK(parse_csv(trace_csv(dm, {})).rows.empty());
  try {
    trace_csv(dm, {"zeta"});
    FAIL("expected an unknown-name error");
  } catch (const std::out_of_range& e) {
    const std::string msg = e.what();
    CHECK(msg.find("zeta") != std::string::npos);
    CHECK(msg.find("available: a b") != std::string::npos);
  }
}
