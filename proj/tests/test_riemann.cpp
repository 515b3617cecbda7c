/* SPDX-License-Identifier: Apache-2.0 */

#include "oracles.hpp"

#include <cmeasure/catalog.hpp>
#include <cmeasure/riemann.hpp>

#include <gtest/gtest.h>

#include <thread>

using namespace cmeasure;

namespace {

Bridge entry_bridge(const std::string &name)
{
	return Bridge(catalog_entry(name).function);
}

/* Identity on a domain with h_n = tent(1/2, 1/8, 4 2^-n); Gamma_2 has a gap
 * around 1/2 of halfwidth 5/72. */
AEFunction gap_instance()
{
	AEFunction f;
	f.domain = RegularSeq([](std::size_t n) {
		return Polygonal::tent(Rational(1, 2), Rational(1, 8), 4 * pow2(-long(n)));
	}, Rational(1), "gap_tents");
	f.name = "gap_identity";
	f.evaluator = [](const DomainWitness &w) { return w.x; };
	return f;
}

/* Coefficient-wise oracle: expand both step functions to level max(ma, mb). */
Rational expanded_l1(const std::vector<Rational> &a, unsigned ma,
                     const std::vector<Rational> &b, unsigned mb)
{
	unsigned m = std::max(ma, mb);
	Rational s = 0;
	for (std::size_t l = 0; l < (std::size_t(1) << m); ++l) {
		const Rational &x = a[l >> (m - ma)];
		const Rational &y = b[l >> (m - mb)];
		s += x > y ? Rational(x - y) : Rational(y - x);
	}
	return s / Rational(Integer(static_cast<unsigned long>(std::size_t(1) << m)));
}

Rational net_integral(const NetFunction &nf)
{
	Rational s = 0;
	for (const auto &c : nf.coeffs)
		s += c;
	return s * pow2(-long(nf.index.m));
}

void expect_rejected(const std::function<void()> &fn, ErrorKind kind, const std::string &needle)
{
	try {
		fn();
		ADD_FAILURE() << "expected rejection containing '" << needle << "'";
	} catch (const Error &e) {
		EXPECT_EQ(e.kind, kind);
		EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
	}
}

} // namespace

/* ---- nets -------------------------------------------------------------- */

TEST(NetIndex, CanonicalIsValidAndOrdered)
{
	for (unsigned m = 0; m <= 8; ++m) {
		NetIndex a = NetIndex::canonical(m, 3);
		EXPECT_NO_THROW(a.validate());
		EXPECT_EQ(a.cells.size(), std::size_t(1) << m);
	}
	EXPECT_TRUE(NetIndex::canonical(5, 3).after(NetIndex::canonical(4, 3)));
	EXPECT_FALSE(NetIndex::canonical(4, 3).after(NetIndex::canonical(4, 1)));
}

TEST(NetIndex, RejectsMalformedTags)
{
	NetIndex a = NetIndex::canonical(2, 3);
	a.cells.pop_back();
	expect_rejected([&] { a.validate(); }, ErrorKind::input, "2^m cells");

	NetIndex b = NetIndex::canonical(2, 3);
	b.cells[1] = {5, 3, 3}; /* (5/8, 6/8) lies in cell 2, not cell 1 */
	expect_rejected([&] { b.validate(); }, ErrorKind::input, "cell 1");

	NetIndex c = NetIndex::canonical(2, 3);
	c.cells[0] = {0, 1, 3}; /* sub-cell level below the net level */
	expect_rejected([&] { c.validate(); }, ErrorKind::input, "cell 0");

	NetIndex d = NetIndex::canonical(2, 3);
	d.cells[3] = {13, 4, 3}; /* 13/16 lies in (3/4, 1) */
	EXPECT_NO_THROW(d.validate());
}

TEST(NetIndex, LipschitzCertificateLevels)
{
	RiemannCertificate c = lipschitz_certificate(Rational(1));
	for (unsigned j = 0; j <= 12; ++j) {
		Rational eps = pow2(-long(j));
		NetIndex a = c.modulus(eps);
		EXPECT_LT(Rational(5, 4) * pow2(-long(a.m)), eps);
		if (a.m > 1) {
			EXPECT_GE(Rational(5, 4) * pow2(1 - long(a.m)), eps);
		}
	}
	expect_rejected([&] { c.modulus(Rational(0)); }, ErrorKind::input, "eps");
}

TEST(NetIndex, StepDistanceMatchesExpansion)
{
	std::mt19937_64 rng(17);
	for (int i = 0; i < 100; ++i) {
		unsigned ma = unsigned(rng() % 5), mb = unsigned(rng() % 5);
		std::vector<Rational> a, b;
		for (std::size_t l = 0; l < (std::size_t(1) << ma); ++l)
			a.push_back(oracle::random_rational(rng));
		for (std::size_t l = 0; l < (std::size_t(1) << mb); ++l)
			b.push_back(oracle::random_rational(rng));
		EXPECT_EQ(step_l1_distance(a, ma, b, mb), expanded_l1(a, ma, b, mb));
		EXPECT_EQ(step_l1_distance(a, ma, b, mb), step_l1_distance(b, mb, a, ma));
	}
}

/* ---- Delta and Gamma --------------------------------------------------- */

TEST(Delta, ChebyshevBoundForCatalogDomains)
{
	for (const AEFunction &f : {catalog_entry("ae-step").function, gap_instance(),
	                            catalog_entry("half-indicator").function}) {
		Bridge b(f);
		for (unsigned n = 0; n <= 12; ++n) {
			Rational len = b.delta_union(n).length();
			Rational cheb = 1 - f.domain.term(n).integral() * rpow(Rational(3, 2), n);
			EXPECT_GE(len, cheb) << f.name << " n=" << n;
			EXPECT_GT(cheb, 1 - rpow(Rational(3, 4), n)) << f.name << " n=" << n;
			EXPECT_EQ(b.delta_defect(n), 1 - len);
		}
	}
}

TEST(Delta, Examples)
{
	Bridge full = entry_bridge("identity");
	EXPECT_EQ(full.delta_union(4), IntervalUnion::unit());
	EXPECT_LE(rabs(measure(build_delta(full, 4), 10) - 1), pow2(-10));

	/* h_n = tent(1/2, 1/8, 4 2^-n): analytic sublevel solve at (2/3)^n */
	Bridge g(gap_instance());
	for (unsigned n = 1; n <= 6; ++n) {
		Rational top = 4 * pow2(-long(n)), th = rpow(Rational(2, 3), n);
		IntervalUnion expect = IntervalUnion::unit();
		if (top > th) {
			Rational r = Rational(1, 8) * (1 - th / top);
			expect = IntervalUnion({{Rational(0), Rational(1, 2) - r}, {Rational(1, 2) + r, Rational(1)}});
		}
		EXPECT_EQ(g.delta_union(n), expect) << n;
	}
	EXPECT_GT(1 - g.delta_defect(0), 0);
}

TEST(Gamma, LowerBoundIdentityAndRate)
{
	for (const AEFunction &f : {catalog_entry("ae-step").function, gap_instance()}) {
		Bridge b(f);
		for (unsigned n = 0; n <= 8; ++n)
			for (unsigned K : {n, n + 3, n + 9}) {
				Rational s = 1;
				for (unsigned k = n; k <= K; ++k)
					s -= b.delta_defect(k);
				s -= Bridge::gamma_tail(K);
				EXPECT_EQ(b.gamma_lower_bound(n, K), s);
				EXPECT_GE(s, 1 - 4 * rpow(Rational(3, 4), n));
				EXPECT_EQ(build_gamma(b, n, K).lower_bound, s);
			}
	}
	/* geometric identity behind the tail */
	Rational sum = 0;
	for (unsigned k = 3; k <= 200; ++k)
		sum += rpow(Rational(3, 4), k);
	EXPECT_EQ(sum + Bridge::gamma_tail(200), 4 * rpow(Rational(3, 4), 3));
}

TEST(Gamma, MeasureOfCatalogGamma)
{
	Bridge full = entry_bridge("identity");
	EXPECT_LE(rabs(measure(build_gamma(full, 2, 4).set, 6) - 1), pow2(-6));

	Bridge b = entry_bridge("ae-step");
	GammaSet G = build_gamma(b, 2, 6);
	Rational v = measure(G.set, 10);
	EXPECT_GE(v, 1 - 4 * rpow(Rational(3, 4), 2) - pow2(-10));
	EXPECT_GE(v, G.lower_bound - pow2(-10));
	EXPECT_THROW(build_gamma(b, 4, 2), Error);
}

TEST(Gamma, PrefixIsNestedAndMemoized)
{
	Bridge b = entry_bridge("ae-step");
	for (unsigned n = 0; n <= 4; ++n)
		for (unsigned K = n; K <= n + 6; ++K) {
			const IntervalUnion &P = b.gamma_prefix(n, K);
			EXPECT_EQ(&P, &b.gamma_prefix(n, K));
			EXPECT_EQ(P.intersect(b.gamma_prefix(n, K + 1)), b.gamma_prefix(n, K + 1));
		}
}

/* ---- Theta ------------------------------------------------------------- */

TEST(Theta, Examples)
{
	Bridge full = entry_bridge("identity");
	for (unsigned m = 0; m <= 8; ++m)
		EXPECT_TRUE(theta_membership(full, (std::uint64_t(1) << m) - 1, m, 3)) << m;

	Bridge g(gap_instance());
	/* (7/16, 1/2) lies inside the gap of Gamma_2 */
	EXPECT_FALSE(theta_membership(g, 7, 4, 2));
	EXPECT_EQ(oracle::gamma_cell_measure(g, 7, 4, 2).second, 0);
	EXPECT_TRUE(theta_membership(g, 0, 4, 2));

	expect_rejected([&] { theta_membership(full, 16, 4, 2); }, ErrorKind::input, "k < 2^m");
}

TEST(Theta, TwoSidedGuaranteeAgainstOracle)
{
	for (const AEFunction &f : {catalog_entry("ae-step").function, gap_instance()}) {
		Bridge b(f);
		for (unsigned n = 0; n <= 4; ++n)
			for (unsigned m = 0; m <= 6; ++m) {
				Rational cellsq = pow2(-2 * long(m));
				for (std::uint64_t k = 0; k < (std::uint64_t(1) << m); ++k) {
					bool t = theta_membership(b, k, m, n);
					auto [lo, hi] = oracle::gamma_cell_measure(b, k, m, n);
					if (t)
						EXPECT_GT(hi, cellsq / 4) << f.name << " " << k << "," << m << "," << n;
					else
						EXPECT_LT(lo, 3 * cellsq / 4) << f.name << " " << k << "," << m << "," << n;
					/* clear-cut oracle cases must be decided the same way */
					if (lo > 3 * cellsq / 4) {
						EXPECT_TRUE(t);
					}
					if (hi < cellsq / 4) {
						EXPECT_FALSE(t);
					}
					EXPECT_EQ(t, theta_membership(b, k, m, n));
				}
			}
	}
}

/* ---- zeta -------------------------------------------------------------- */

TEST(Zeta, FullGammaLandsInOpenCell)
{
	Bridge b = entry_bridge("identity");
	for (unsigned m : {1u, 3u, 6u})
		for (std::uint64_t k : {std::uint64_t(0), (std::uint64_t(1) << m) - 1}) {
			DyadicInterval I(k, m);
			Rational x = rat_approx(sample_zeta(b, k, m, 3).x, 10 + m);
			EXPECT_GT(x, I.left());
			EXPECT_LT(x, I.right());
		}
}

TEST(Zeta, ThetaNegativeCellUsesDomainWitness)
{
	Bridge b(gap_instance());
	ASSERT_FALSE(b.theta(7, 4, 2));
	DomainWitness w = sample_zeta(b, 7, 4, 2);
	Rational x = rat_approx(w.x, 20);
	EXPECT_GE(x, Rational(7, 16));
	EXPECT_LE(x, Rational(1, 2));
	EXPECT_TRUE(verify_witness(b.function().domain, w, 15, 30).ok);
}

TEST(Zeta, StepFunctionCellsAvoidHalf)
{
	Bridge b = entry_bridge("ae-step");
	const RegularSeq &dom = b.function().domain;
	for (unsigned m : {2u, 4u, 6u})
		for (std::uint64_t k : {(std::uint64_t(1) << (m - 1)) - 1, std::uint64_t(1) << (m - 1)}) {
			DomainWitness w = sample_zeta(b, k, m, 3);
			Rational x = rat_approx(w.x, 40);
			EXPECT_GT(rabs(x - Rational(1, 2)), exclusion_distance(1, w.gamma) / 2) << k << "," << m;
			EXPECT_TRUE(verify_witness(dom, w, 15, 40).ok);
			Rational fx = b.function()(w).approx(4);
			EXPECT_EQ(fx, x > Rational(1, 2) ? 1 : 0);
		}
}

TEST(Zeta, MemoizedAndDeterministic)
{
	Bridge b1 = entry_bridge("ae-step"), b2 = entry_bridge("ae-step");
	const DomainWitness &w = b1.zeta(5, 4, 3);
	EXPECT_EQ(&w, &b1.zeta(5, 4, 3));
	EXPECT_EQ(rat_approx(w.x, 30), rat_approx(b2.zeta(5, 4, 3).x, 30));
	EXPECT_EQ(w.gamma, b2.zeta(5, 4, 3).gamma);
	EXPECT_EQ(b1.zeta_count(), 1u);
}

TEST(Zeta, ConcurrentCoefficientsAgree)
{
	Bridge b = entry_bridge("identity");
	std::vector<std::vector<Rational>> seen(4);
	std::vector<std::thread> ts;
	for (std::size_t t = 0; t < seen.size(); ++t)
		ts.emplace_back([&, t] {
			for (std::uint64_t k = 0; k < 16; ++k)
				seen[t].push_back(b.coefficient((k + 5 * t) % 16, 4, 3, 8));
		});
	for (auto &t : ts)
		t.join();
	for (std::size_t t = 0; t < seen.size(); ++t)
		for (std::uint64_t k = 0; k < 16; ++k)
			EXPECT_EQ(seen[t][k], b.coefficient((k + 5 * t) % 16, 4, 3, 8));
	EXPECT_EQ(b.zeta_count(), 16u);
}

/* ---- net functions ----------------------------------------------------- */

TEST(NetFunction, Examples)
{
	Bridge c = entry_bridge("constant");
	for (unsigned m : {0u, 3u, 5u}) {
		NetFunction nf = net_function(c, NetIndex::canonical(m, 3));
		EXPECT_LE(rabs(lebesgue_integral(nf.summable, 10) - 1), pow2(-10));
	}

	Bridge id = entry_bridge("identity");
	NetFunction n3 = net_function(id, NetIndex::canonical(3, 3));
	EXPECT_GE(net_integral(n3), Rational(7, 16) - n3.coefficient_error);
	EXPECT_LE(net_integral(n3), Rational(9, 16) + n3.coefficient_error);
	/* indicator approximants of index 22 lose 2^-24 of each cell */
	EXPECT_EQ(lebesgue_integral(n3.summable, 20), net_integral(n3) * (1 - pow2(-24)));

	NetFunction n6 = net_function(id, NetIndex::canonical(6, 3));
	EXPECT_LE(rabs(net_integral(n6) - Rational(1, 2)), pow2(-6) + pow2(-8));
}

TEST(NetFunction, MonotoneRiemannBracket)
{
	auto sq = [](const Rational &x) -> Rational { return x * x; };
	auto id = [](const Rational &x) -> Rational { return x; };
	auto step = [](const Rational &x) -> Rational { return Rational(x > Rational(1, 2) ? 1 : 0); };
	struct Case {
		const char *name;
		std::function<Rational(const Rational &)> f;
	};
	for (const Case &cs : {Case{"identity", id}, Case{"square", sq}, Case{"ae-step", step}}) {
		Bridge b = entry_bridge(cs.name);
		for (unsigned m = 1; m <= 5; ++m) {
			NetFunction nf = net_function(b, NetIndex::canonical(m, 3));
			auto [lo, hi] = oracle::monotone_riemann_bracket(cs.f, m);
			EXPECT_GE(net_integral(nf), lo - nf.coefficient_error) << cs.name << " m=" << m;
			EXPECT_LE(net_integral(nf), hi + nf.coefficient_error) << cs.name << " m=" << m;
		}
	}
}

TEST(NetFunction, EvaluatorPicksTheCell)
{
	NetFunction nf = net_function(entry_bridge("identity"), NetIndex::canonical(2, 3));
	const Summable &s = nf.summable;
	PositivePoint pp = positive_point(s, 8);
	Rational x = rat_approx(pp.witness.x, 20);
	std::size_t l = std::size_t(rfloor(x * 4).get_ui());
	EXPECT_EQ(s(pp.witness).approx(10), nf.coeffs[l]);
}

/* ---- probe ------------------------------------------------------------- */

TEST(MeanCauchyProbe, Examples)
{
	ProbeReport c = mean_cauchy_probe(entry_bridge("constant"), NetIndex::canonical(2, 3), 6, 1);
	EXPECT_EQ(c.max_l1, 0);
	EXPECT_EQ(c.trials, 6u);

	ProbeReport i = mean_cauchy_probe(entry_bridge("identity"), NetIndex::canonical(4, 3), 8, 2);
	EXPECT_LT(i.max_l1, Rational(1, 8));
	EXPECT_LE(i.max_l1, 2 * pow2(-4) + 2 * pow2(-8));
	EXPECT_EQ(i.error, pow2(-7));
}

TEST(MeanCauchyProbe, OscillatingDoesNotShrink)
{
	Bridge b = entry_bridge("oscillating");
	ProbeReport coarse = mean_cauchy_probe(b, NetIndex::canonical(2, 3), 4, 3);
	ProbeReport fine = mean_cauchy_probe(b, NetIndex::canonical(5, 3), 4, 3);
	/* an integrable f would give at most about 2 2^-m */
	EXPECT_GT(fine.max_l1, Rational(1, 8));
	EXPECT_GT(fine.max_l1, coarse.max_l1 / 4);
}

TEST(MeanCauchyProbe, Deterministic)
{
	Bridge b = entry_bridge("square");
	ProbeReport a = mean_cauchy_probe(b, NetIndex::canonical(3, 3), 5, 9);
	ProbeReport c = mean_cauchy_probe(entry_bridge("square"), NetIndex::canonical(3, 3), 5, 9);
	EXPECT_EQ(a.max_l1, c.max_l1);
}

/* ---- conversion -------------------------------------------------------- */

TEST(Convert, CatalogIntegrals)
{
	for (const char *name : {"identity", "ae-step", "pl3"}) {
		CatalogEntry e = catalog_entry(name);
		Bridge b(e.function);
		Conversion cv = convert_to_lebesgue(b, *e.certificate);
		Rational v = lebesgue_integral(cv.g, 7);
		EXPECT_LE(rabs(v - *e.expected), pow2(-7)) << name;
		for (std::size_t j = 0; j <= 6; ++j) {
			const NetFunction &a = cv.net(j), &c = cv.net(j + 1);
			EXPECT_LT(step_l1_distance(a.coeffs, a.index.m, c.coeffs, c.index.m), pow2(-long(j)));
		}
	}
}

TEST(Convert, IdempotentOnSummableInput)
{
	CatalogEntry e = catalog_entry("square");
	Conversion cv = convert_to_lebesgue(Bridge(e.function), *e.certificate);
	unsigned p = 6;
	EXPECT_LE(rabs(lebesgue_integral(cv.g, p) - lebesgue_integral(*e.summable, p)), pow2(2 - long(p)));
}

TEST(Convert, DefectiveCertificateIsRejectedWithIndex)
{
	AEFunction f;
	f.name = "tall_tent";
	f.evaluator = [](const DomainWitness &w) {
		return eval_at(Polygonal::tent(Rational(1, 2), Rational(1, 2), Rational(8)), w.x);
	};
	Conversion cv = convert_to_lebesgue(Bridge(f), lipschitz_certificate(Rational(0)));
	expect_rejected([&] { lebesgue_integral(cv.g, 6); }, ErrorKind::certification, "limit: integral |F_");

	RiemannCertificate shrinking{[](const Rational &eps) {
		return NetIndex::canonical(eps < Rational(1, 4) ? 1 : 3, 3);
	}};
	Conversion bad = convert_to_lebesgue(entry_bridge("identity"), shrinking);
	expect_rejected([&] { bad.net(2); }, ErrorKind::certification, "not directed at j = 2");
}

/* ---- equality sampling ------------------------------------------------- */

TEST(Equality, SummableIdentityPasses)
{
	EqualityReport r = equality_region_check(entry_bridge("identity"), 3, 8, 8, 4);
	EXPECT_EQ(r.samples, 8u);
	EXPECT_EQ(r.passed, 8u);
	ASSERT_EQ(r.ladder.size(), r.ladder_l1.size() + 1);
	EXPECT_EQ(r.ladder.front(), 3u);
	for (std::size_t k = 0; k < r.ladder_l1.size(); ++k) {
		EXPECT_LT(r.ladder[k], r.ladder[k + 1]);
		EXPECT_LT(r.ladder_l1[k], pow2(-long(k)));
	}
	EXPECT_LE(rabs(r.ladder_integral - Rational(1, 2)), pow2(-long(r.ladder.back())) + pow2(-6));
}

TEST(Equality, StepFunctionPassesAndOffsetFails)
{
	Bridge b = entry_bridge("ae-step");
	EqualityReport r = equality_region_check(b, 3, 16, 10, 1);
	EXPECT_EQ(r.samples, 16u);
	EXPECT_EQ(r.passed, 16u);
	for (const auto &x : r.sample_points)
		EXPECT_NE(x, Rational(1, 2));

	EqualityReport off = equality_region_check(b, 3, 16, 10, 1, Rational(1, 4));
	EXPECT_EQ(off.passed, 0u);
	EXPECT_EQ(off.sample_points, r.sample_points);
}
