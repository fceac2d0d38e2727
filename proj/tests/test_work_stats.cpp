#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "otto/work_stats.hpp"

using namespace otto;

namespace {

struct Fixture {
  ChainModel model;
  DriveProtocol protocol;
  Spectrum spec0, spec1;

  explicit Fixture(double tau) : model(params()) {
    protocol.epsilon = 1.0;
    protocol.d0 = 2.5;
    protocol.tau = tau;
    const auto blocks = sz_blocks(model);
    spec0 = diagonalize(model.hamiltonian(protocol.d0), blocks);
    spec1 = track_path([this](double d) { return model.hamiltonian(d); }, spec0, protocol.d0, protocol.d1(), &blocks);
  }

  static ChainParams params() {
    ChainParams p;
    p.j1 = 1.0;
    p.j2 = -1.0;
    p.b = 0.1;
    return p;
  }
};

/// Level shifts and Gibbs weights straight from the closed-form energies.
struct LabelSums {
  double w2 = 0, w4 = 0, s2 = 0, s4 = 0, q_in = 0;
};

LabelSums label_sums(double d0, double d1, double bh, double bl) {
  const RealVector e0 = oracle::energies(1.0, -1.0, 0.1, d0), e1 = oracle::energies(1.0, -1.0, 0.1, d1);
  const RealVector x = (-bh * e0.array()).exp() / (-bh * e0.array()).exp().sum();
  const RealVector y = (-bl * e1.array()).exp() / (-bl * e1.array()).exp().sum();
  LabelSums s;
  for (int n = 0; n < 16; ++n) {
    const double de = e1(n) - e0(n);
    s.w2 += x(n) * de;
    s.s2 += x(n) * de * de;
    s.w4 -= y(n) * de;
    s.s4 += y(n) * de * de;
    s.q_in += e0(n) * (x(n) - y(n));
  }
  return s;
}

}  // namespace

TEST_SUITE("work_stats") {
  TEST_CASE("adiabatic works and heats against label sums") {
    for (double tau : {0.8, 2.3}) {
      const Fixture f(tau);
      const LabelSums ref = label_sums(2.5, f.protocol.d1(), 1 / 40.0, 1 / 10.0);
      const AdiabaticWorks w = adiabatic_works(f.spec0, f.spec1, 1 / 40.0, 1 / 10.0);
      CHECK(w.w2 == doctest::Approx(ref.w2).epsilon(1e-11));
      CHECK(w.w4 == doctest::Approx(ref.w4).epsilon(1e-11));
      const Heats q = heats(f.spec0, f.spec1, 1 / 40.0, 1 / 10.0);
      CHECK(q.q_in == doctest::Approx(ref.q_in).epsilon(1e-11));
      CHECK(std::abs(w.w2 + w.w4 + q.q_in + q.q_out) < 1e-12);
      CHECK(q.balance_residual < 1e-12);
      const WorkFluctuation fl = work_fluctuation(f.spec0, f.spec1, 1 / 40.0, 1 / 10.0);
      CHECK(fl.w2.mean_square == doctest::Approx(ref.s2).epsilon(1e-11));
      CHECK(fl.w4.mean_square == doctest::Approx(ref.s4).epsilon(1e-11));
      CHECK(fl.dw_ad == doctest::Approx(std::sqrt(ref.s2 - ref.w2 * ref.w2 + ref.s4 - ref.w4 * ref.w4)).epsilon(1e-10));
      const double eta = efficiency_finite(f.spec0, f.spec1, 1 / 40.0, 1 / 10.0);
      CHECK(eta == doctest::Approx(-(ref.w2 + ref.w4) / ref.q_in).epsilon(1e-10));
    }
  }

  TEST_CASE("power") {
    CHECK(output_power(-1.0, 0.4, 2.0, 2.0) == doctest::Approx(0.15));
    CHECK(output_power(-1.0, 0.4, 2.0, 2.0, 1.0, 1.0) == doctest::Approx(0.1));
  }

  TEST_CASE("equal temperatures and spectra give no engine") {
    const Fixture f(1.0);
    CHECK_THROWS_AS(efficiency_finite(f.spec0, f.spec0, 0.1, 0.05), ValidationError);
    const Heats q = heats(f.spec0, f.spec1, 0.1, 0.1);
    const AdiabaticWorks w = adiabatic_works(f.spec0, f.spec1, 0.1, 0.1);
    // Second law: a single-temperature cycle cannot produce work.
    CHECK(w.w2 + w.w4 >= -1e-12);
    CHECK(std::abs(w.w2 + w.w4 + q.q_in + q.q_out) < 1e-12);
  }

  TEST_CASE("mismatched spectra are rejected") {
    const Fixture f(1.0);
    Spectrum bad = f.spec1;
    bad.energies.conservativeResize(8);
    CHECK_THROWS_AS(adiabatic_works(f.spec0, bad, 0.1, 0.05), ValidationError);
  }

  TEST_CASE("mean work along the stroke and irreversible work") {
    const Fixture f(2.3);
    StrokeOptions opts;
    opts.samples = 24;
    const StrokeResult r = run_stroke(f.model, f.protocol, f.spec0, opts);
    const std::size_t last = r.samples.size() - 1;
    const LabelSums ref = label_sums(2.5, f.protocol.d1(), 1 / 40.0, 1 / 10.0);
    CHECK(total_mean_work(r, 0, 1 / 40.0) == doctest::Approx(0.0));
    CHECK(total_mean_work(r, last, 1 / 40.0) == doctest::Approx(ref.w2).epsilon(1e-6));
    for (auto ref_kind : {IrreversibleReference::transported, IrreversibleReference::gibbs_cd}) {
      const auto trace = irreversible_work_trace(r, 1 / 40.0, ref_kind);
      CHECK(trace.size() == r.samples.size());
      CHECK(trace.front() == doctest::Approx(0.0));
      for (double w : trace) CHECK(w >= 0.0);
    }
    // Transported weights return exactly at the end of a transitionless
    // stroke; the instantaneous Gibbs reference keeps the relative entropy
    // between the two thermal distributions.
    const auto transported = irreversible_work_trace(r, 1 / 40.0, IrreversibleReference::transported);
    CHECK(std::abs(transported.back()) < 1e-6);
    const auto gibbs_cd = irreversible_work_trace(r, 1 / 40.0, IrreversibleReference::gibbs_cd);
    const RealVector p0 = gibbs(f.spec0, 1 / 40.0).probs, p1 = gibbs(f.spec1, 1 / 40.0).probs;
    double kl = 0.0;
    for (int n = 0; n < 16; ++n) kl += p0(n) * std::log(p0(n) / p1(n));
    CHECK(gibbs_cd.back() == doctest::Approx(40.0 * kl).epsilon(1e-6));
  }
}
