#include <gtest/gtest.h>

#include "lmpflp/bounds.hpp"
#include "lmpflp/dual_witness.hpp"
#include "lmpflp/error.hpp"
#include "lmpflp/factor_lp.hpp"

#include <algorithm>
#include <cmath>

using namespace lmpflp;

namespace {

// Dense scan of V(z) + T(M(z) - 1), independent of the golden search.
double scan_analytic(double T) {
  double best = 2.0;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double z = (1.0 / 3.0 - 1e-9) * i / n;
    best = std::min(best, jms_dual_v(z) + T * jms_dual_m_minus_one(z));
  }
  return best;
}

SearchOptions coarse() {
  SearchOptions o;
  o.delta_step = 1e-2;
  o.alpha_points = 80;
  o.bisect_iters = 50;
  return o;
}

// Naive grid over the full adversary (alpha_L, alpha_MM, beta_MM) at one delta.
double naive_eta2_inner(const BoundFn& bound, double delta, double beta2, int n) {
  double best = -kInfinity;
  for (int i = 0; i <= n; ++i) {
    const double aL = static_cast<double>(i) / n;
    for (int j = 0; j <= n; ++j) {
      const double aMM = (1.0 - aL) * j / n;
      for (int k = 0; k <= n; ++k) {
        const double bMM = beta2 * k / n;
        const Eta2Terms t = eta2_terms(delta, aL, aMM, bMM, beta2);
        const double rb = aL > 0 ? 2 * (1 - aL) + bound(t.T_L) * aL : 2.0;
        best = std::max(best, std::min(t.rho_A, rb));
      }
    }
  }
  return best;
}

}  // namespace

TEST(AnalyticBound, ZeroPointGivesTwo) {
  EXPECT_DOUBLE_EQ(jms_dual_v(0.0), 2.0);
  EXPECT_DOUBLE_EQ(jms_dual_m_minus_one(0.0), 0.0);
  EXPECT_DOUBLE_EQ(analytic_bound(kInfinity).value, 2.0);
  for (double T : {0.0, 0.1, 3.0, 100.0, 1e6}) EXPECT_LE(analytic_bound(T).value, 2.0);
  EXPECT_THROW(analytic_bound(-1.0), InvalidArgument);
}

TEST(AnalyticBound, MatchesDenseScan) {
  for (double T : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    const AnalyticBound b = analytic_bound(T);
    EXPECT_NEAR(b.value, scan_analytic(T), 1e-9) << "T=" << T;
    EXPECT_NEAR(jms_dual_v(b.z) + T * jms_dual_m_minus_one(b.z), b.value, 1e-15);
  }
}

TEST(AnalyticBound, BelowTheCorollary) {
  for (double T : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
    EXPECT_LE(analytic_bound(T).value, corollary_bound(T) + 1e-9) << "T=" << T;
    const double z = 1.0 / (2.0 * (7.0 + 3.0 * T));
    EXPECT_LE(jms_dual_v(z) + T * jms_dual_m_minus_one(z), corollary_bound(T) + 1e-12);
  }
}

TEST(AnalyticBound, AboveTheLp) {
  for (int q : {3, 6, 10})
    for (double T : {0.5, 2.0, 10.0}) EXPECT_LE(opt_jms(q, T), analytic_bound(T).value + 1e-6);
}

TEST(ConcaveEnvelope, UpperBoundsAConcaveFunction) {
  auto f = [](double T) { return 2.0 - 1.0 / (1.0 + T) - 0.2 / (1.0 + 0.05 * T); };
  std::vector<double> Ts{0.0, 0.3, 1.0, 2.0, 5.0, 9.0, 20.0};
  std::vector<double> vs;
  for (double T : Ts) vs.push_back(f(T));
  const ConcaveEnvelope env(Ts, vs, 2.0);
  for (std::size_t k = 0; k < Ts.size(); ++k) EXPECT_NEAR(env(Ts[k]), vs[k], 1e-15);
  double prev = env(0.0);
  for (double T = 0.0; T < 100.0; T += 0.01) {
    EXPECT_GE(env(T), f(T) - 1e-12) << T;
    EXPECT_LE(env(T), 2.0);
    EXPECT_GE(env(T), prev - 1e-12);
    prev = env(T);
  }
  EXPECT_DOUBLE_EQ(env(kInfinity), 2.0);
}

TEST(ConcaveEnvelope, RejectsBadSamples) {
  EXPECT_THROW(ConcaveEnvelope({1.0}, {1.0}, 2.0), InvalidArgument);
  EXPECT_THROW(ConcaveEnvelope({0.0, 0.0}, {1.0, 1.0}, 2.0), InvalidArgument);
  EXPECT_THROW(ConcaveEnvelope({0.0, 1.0}, {1.0}, 2.0), InvalidArgument);
}

TEST(ConcaveEnvelope, AnalyticEnvelopeIsTight) {
  const ConcaveEnvelope env = ConcaveEnvelope::analytic();
  for (double T : {0.7, 3.3, 16.25, 90.0, 1234.5}) {
    const double exact = analytic_bound(T).value;
    EXPECT_GE(env(T), exact - 1e-12);
    EXPECT_LE(env(T), exact + 1e-5);
  }
}

TEST(ConcaveEnvelope, PlusLpSamplesAreExact) {
  const ConcaveEnvelope env = ConcaveEnvelope::plus_lp(4, 2);
  ASSERT_EQ(env.grid(), ConcaveEnvelope::default_grid());
  EXPECT_NEAR(env(2.0), opt_plus(4, 2.0), 1e-12);
  EXPECT_GE(env(3.0), opt_plus(4, 3.0) - 1e-9);
}

TEST(Eta2, PaperWorstPointTerms) {
  const Eta2Terms t = eta2_terms(0.49777, 0.4948527, 0.004005537, 0.00097229266, 2.0);
  EXPECT_NEAR(t.T_L, 16.25852, 1e-4);
  EXPECT_NEAR(2.0 - t.rho_A, 0.005360, 1e-5);
}

TEST(Eta2, ReductionMatchesNaiveAdversary) {
  const ConcaveEnvelope env = ConcaveEnvelope::analytic();
  const BoundFn bound = std::cref(env);
  for (double delta : {0.1, 0.3, 0.45, 0.5}) {
    const double naive = naive_eta2_inner(bound, delta, 2.0, 40);
    const Eta2Result r = eta2_at_delta(bound, 2.0, delta);
    const double reduced = 2.0 - r.eta2;
    EXPECT_LE(naive, reduced + 1e-9) << "delta=" << delta;
    EXPECT_LE(reduced - naive, 1e-2) << "delta=" << delta;
    const Eta2Terms t = eta2_terms(delta, r.alpha_L, r.alpha_MM, r.beta_MM, 2.0);
    EXPECT_NEAR(std::min(t.rho_A, 2 * (1 - r.alpha_L) + env(t.T_L) * r.alpha_L), reduced, 1e-9);
  }
}

TEST(Eta2, SearchDominatesNaiveGridAtItsDelta) {
  const ConcaveEnvelope env = ConcaveEnvelope::analytic();
  const BoundFn bound = std::cref(env);
  const Eta2Result r = eta2_search(bound, 2.0, coarse());
  const double naive = naive_eta2_inner(bound, r.delta, 2.0, 30);
  EXPECT_LE(naive, 2.0 - r.eta2 + 1e-9);
  const Eta2Terms t = eta2_terms(r.delta, r.alpha_L, r.alpha_MM, r.beta_MM, 2.0);
  EXPECT_NEAR(t.T_L, r.T_L, 1e-9);
  EXPECT_LE(r.alpha_MM, 1.0 - r.alpha_L + 1e-12);
  EXPECT_LE(r.beta_MM, 2.0 + 1e-12);
}

TEST(Eta2, AnalyticModeIsPositive) {
  const Eta2Result r = eta2_search(0, 2.0, BoundMode::Analytic, coarse());
  EXPECT_GT(r.eta2, 0.0);
  EXPECT_LT(r.eta2, 0.05);
}

TEST(Eta2, SmallerBeta2IsNoWorse) {
  const Eta2Result a = eta2_search(0, 2.0, BoundMode::Analytic, coarse());
  const Eta2Result b = eta2_search(0, 0.0, BoundMode::Analytic, coarse());
  EXPECT_GE(b.eta2, a.eta2 - 1e-9);
}

TEST(Eta2, LpModeIsZeroWhileThePlusLpSaturates) {
  // With alpha_L just above 1/2 and no matched mass, rho_A exceeds 2 while
  // T_L stays at 16 or more; once opt_plus(q, 16) = 2 the adversary wins.
  ASSERT_NEAR(opt_plus(6, 16.0), 2.0, 1e-9);
  const Eta2Terms t = eta2_terms(0.5, 0.5, 0.0, 0.0, 2.0);
  EXPECT_NEAR(t.T_L, 16.0, 1e-12);
  SearchOptions o = coarse();
  const Eta2Result r = eta2_search(6, 2.0, BoundMode::Lp, o);
  EXPECT_NEAR(r.eta2, 0.0, 1e-12);
  EXPECT_THROW(eta2_search(1, 2.0, BoundMode::Lp, o), InvalidArgument);
}

TEST(Eta1, PositiveAtAOne) {
  SearchOptions o = coarse();
  o.alpha_points = 40;
  o.bisect_iters = 40;
  const Eta1Result r = eta1_search(0, 1.0, 0.0, BoundMode::Analytic, o);
  EXPECT_GT(r.eta1, 0.0);
  EXPECT_GE(r.eta, 0.0);
  EXPECT_LE(r.eta, 1.0);
  EXPECT_GE(r.beta_L1, 0.0);
  EXPECT_LE(r.beta_L1, 2.0 + 1e-12);
  EXPECT_THROW(eta1_search(0, 0.0, 0.0, BoundMode::Analytic, o), InvalidArgument);
}

TEST(Eta1, SmallAWeakensTheBound) {
  SearchOptions o = coarse();
  o.alpha_points = 40;
  o.bisect_iters = 40;
  const double at_one = eta1_search(0, 1.0, 0.0, BoundMode::Analytic, o).eta1;
  const double at_tenth = eta1_search(0, 0.1, 0.0, BoundMode::Analytic, o).eta1;
  EXPECT_LE(at_tenth, at_one + 1e-9);
  EXPECT_GE(at_tenth, 0.0);
}

TEST(GeneralFl, PaperValueAtFivePercent) {
  const double v = eta_general_fl(0.05);
  EXPECT_GE(v, 4.5e-7);
  EXPECT_LE(v, 4.7e-7);
}

TEST(GeneralFl, HalfOfTheBestClearsTheTheoremConstant) {
  const GeneralFl g = best_general_fl();
  EXPECT_GE(g.eta_half, 2.25e-7);
  EXPECT_NEAR(eta_general_fl(g.delta_star), 2.0 * g.eta_half, 1e-18);
  for (double d = 0.001; d < eta_general_fl_delta_max(); d += 0.001) EXPECT_LE(eta_general_fl(d), 2.0 * g.eta_half);
}

TEST(GeneralFl, DomainAndLimits) {
  EXPECT_THROW(eta_general_fl(0.0), InvalidArgument);
  EXPECT_THROW(eta_general_fl(0.16), InvalidArgument);
  EXPECT_LT(eta_general_fl(1e-6), 1e-10);
  EXPECT_LT(eta_general_fl(1e-6), eta_general_fl(1e-3));
  EXPECT_LT(eta_general_fl(eta_general_fl_delta_max() - 1e-9), 1e-12);
}

TEST(RhoKmed, PaperValue) {
  const RhoKmed r = rho_kmed_eval(0.00536, 1.3371);
  EXPECT_NEAR(r.rho_kmed, 2.67059, 2e-4);
  EXPECT_LT(r.rho_kmed, 2.67059);
  EXPECT_NEAR(r.worst_a, 0.4955391, 1e-4);
}

TEST(RhoKmed, NoImprovementGivesTwiceRhoBr) {
  EXPECT_NEAR(rho_kmed_eval(0.0).rho_kmed, 2.6742, 1e-12);
}

TEST(RhoKmed, MatchesDenseGrid) {
  for (double eta2 : {0.0, 0.001, 0.00536, 0.1, 1.0, 2.0}) {
    double best = -kInfinity;
    for (int i = 0; i <= 1000000; ++i) {
      const double a = i / 1e6;
      best = std::max(best, std::min(2 * (1 + 2 * a) / (1 + 2 * a * a), 1.3371 * (2 - (1 - a) * eta2)));
    }
    EXPECT_NEAR(rho_kmed_eval(eta2).rho_kmed, best, 1e-6) << "eta2=" << eta2;
  }
}

TEST(RhoKmed, NonIncreasingInEta2) {
  double prev = kInfinity;
  for (double eta2 = 0.0; eta2 <= 2.0; eta2 += 0.01) {
    const double v = rho_kmed_eval(eta2).rho_kmed;
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  EXPECT_LT(rho_kmed_eval(0.01).rho_kmed, 2 * kRhoBr);
  EXPECT_THROW(rho_kmed_eval(-0.1), InvalidArgument);
  EXPECT_THROW(rho_kmed_eval(0.1, 1.0), InvalidArgument);
}

TEST(RhoKmedRefined, ZeroEta1ReducesToTheSimpleForm) {
  const EtaFn zero = [](double, double) { return 0.0; };
  const EtaFn fixed = [](double, double) { return 0.00536; };
  const RhoKmed refined = rho_kmed_refined(zero, fixed);
  const RhoKmed simple = rho_kmed_eval(0.00536);
  EXPECT_NEAR(refined.rho_kmed, simple.rho_kmed, 1e-6);
  EXPECT_NEAR(refined.worst_a, simple.worst_a, 1e-4);
}

TEST(RhoKmedRefined, ExtraTermsOnlyHelp) {
  const EtaFn eta1 = [](double a, double) { return 0.002 * a; };
  const EtaFn eta2 = [](double, double b) { return 0.004 + 0.001 * b; };
  const double refined = rho_kmed_refined(eta1, eta2).rho_kmed;
  EXPECT_LE(refined, rho_kmed_eval(0.006).rho_kmed + 1e-6);
}

TEST(BoundsReport, CollectsTheConstants) {
  const BoundsReport r = make_bounds_report(0.00536);
  EXPECT_NEAR(r.rho_kmed, 2.67059, 2e-4);
  EXPECT_LT(r.rho_kmed, 2 * r.rho_br);
  EXPECT_GE(r.general_fl.eta_half, 2.25e-7);
}

TEST(DualWitness, ZeroShiftIsTheUniformSolution) {
  for (int q : {1, 3, 7, 12}) {
    const DualWitness w = discrete_dual(q, 0, 4.0);
    EXPECT_NEAR(w.V, 2.0 - 1.0 / q, 1e-12);
    EXPECT_NEAR(w.M, 1.0, 1e-12);
    EXPECT_NEAR(w.value, 2.0 - 1.0 / q, 1e-12);
  }
}

TEST(DualWitness, WeakDualityAgainstTheLp) {
  for (int steps : {0, 1, 2, 3, 4})
    for (double T : {1.0, 3.0, 5.0}) {
      const DualWitness w = discrete_dual(12, steps, T);
      EXPECT_GE(w.value, opt_jms(12, T) - 1e-6) << "steps=" << steps << " T=" << T;
    }
}

TEST(DualWitness, ContinuousMMatchesClosedForm) {
  for (double z : {0.0, 0.01, 0.1, 0.2, 0.3, 1.0 / 3.0})
    EXPECT_NEAR(continuous_dual_m(z) - 1.0, jms_dual_m_minus_one(z), 1e-9) << "z=" << z;
}

TEST(DualWitness, DiscreteCostsBelowContinuous) {
  for (int q : {6, 12, 30})
    for (int steps = 0; 3 * steps <= q; ++steps) {
      const DualWitness w = discrete_dual(q, steps, 1.0);
      EXPECT_LE(w.M, continuous_dual_m(w.z) + 1e-9);
      EXPECT_LE(w.V, jms_dual_v(w.z) + 1e-9);
    }
}

TEST(DualWitness, FeasibleForBothLpForms) {
  FactorLpOptions alt;
  alt.alternative_form = true;
  for (int steps : {0, 1, 2, 4})
    for (double T : {1.0, 5.0}) {
      const DualWitness w = discrete_dual(12, steps, T);
      for (const FactorLp& flp : {build_lp(12, T, FactorVariant::Plain), build_lp(12, T, FactorVariant::Plain, alt)}) {
        const DualReport rep = lp_check_dual(flp.model, to_lp_dual(w, flp), 1e-8);
        EXPECT_TRUE(rep.feasible) << "steps=" << steps << " T=" << T << " worst=" << rep.max_violation;
        EXPECT_NEAR(rep.objective, w.value, 1e-9);
      }
    }
}

TEST(DualWitness, RejectsBadShifts) {
  EXPECT_THROW(discrete_dual(12, 5, 1.0), InvalidArgument);
  EXPECT_THROW(discrete_dual(12, -1, 1.0), InvalidArgument);
  EXPECT_THROW(discrete_dual(12, 0.1, 1.0), InvalidArgument);
  EXPECT_NO_THROW(discrete_dual(12, 3.0 / 12.0, 1.0));
  const DualWitness w = discrete_dual(6, 1, 1.0);
  EXPECT_THROW(to_lp_dual(w, build_lp(5, 1.0, FactorVariant::Plain)), InvalidArgument);
  EXPECT_THROW(to_lp_dual(w, build_lp(6, 1.0, FactorVariant::Plus)), InvalidArgument);
}
