/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/catalog.hpp>

namespace cmeasure {

Summable polygonal_summable(const Polygonal &h, const std::string &name)
{
	AEFunction f;
	f.name = name;
	f.evaluator = [h](const DomainWitness &w) { return eval_at(h, w.x); };
	Rational v = h.integral();
	Summable::Hooks hk;
	hk.integral = [v](std::size_t) { return v; };
	hk.step_l1 = [](std::size_t) { return Rational(0); };
	return Summable(f, [h](std::size_t) { return h; }, RegularSeq(), hk);
}

Summable square_schedule(unsigned pieces)
{
	if (pieces == 0)
		fail_input("square schedule needs at least one piece");
	AEFunction f;
	f.name = "square";
	f.evaluator = [](const DomainWitness &w) { return w.x * w.x; };
	auto count = [pieces](std::size_t n) -> Rational {
		return Rational(Integer(pieces)) * pow2(long(n));
	};
	/* the interpolant on N pieces exceeds x^2 by 1/(6 N^2) in integral and
	 * decreases under refinement */
	Summable::Hooks hk;
	hk.integral = [count](std::size_t n) -> Rational {
		Rational N = count(n);
		return Rational(1, 3) + 1 / (6 * N * N);
	};
	hk.step_l1 = [count](std::size_t n) -> Rational {
		Rational N = count(n);
		return 1 / (6 * N * N) - 1 / (24 * N * N);
	};
	auto approx = [count](std::size_t n) {
		Rational N = count(n);
		unsigned long M = N.get_num().get_ui();
		std::vector<Rational> t, v;
		t.reserve(M + 1);
		v.reserve(M + 1);
		for (unsigned long i = 0; i <= M; ++i) {
			Rational x = Rational(Integer(i)) / N;
			t.push_back(x);
			v.push_back(x * x);
		}
		return Polygonal(std::move(t), std::move(v));
	};
	return Summable(f, approx, RegularSeq(), hk);
}

TentsSeries tents_series()
{
	auto tent = [](std::size_t j) {
		return Polygonal::tent(3 * pow2(-long(j) - 2), pow2(-long(j) - 3), pow2(-long(j)));
	};
	auto partial_integral = [](std::size_t n) -> Rational {
		return Rational(1, 6) * (1 - pow2(-2 * long(n) - 2));
	};
	auto tail = [](std::size_t n) -> Rational { return Rational(1, 6) * pow2(-2 * long(n) - 2); };
	auto partial = [tent](std::size_t n) {
		Polygonal acc;
		for (std::size_t j = 0; j <= n; ++j)
			acc = acc + tent(j);
		return polygonal_summable(acc, "tents_" + std::to_string(n));
	};
	/* F_{n+1} - F_n is the single term 2^{-n-1} tent_{n+1} */
	PairBound pb = [](std::size_t n) -> Rational { return pow2(-2 * long(n) - 5); };
	return {partial, partial_integral, tail, limit_of_summables(partial, pb)};
}

namespace {

Rational tri(const Rational &y)
{
	Rational fr = y - Rational(rfloor(y));
	return 1 - rabs(2 * fr - 1);
}

CatalogEntry from_polygonal(const std::string &name, const std::string &desc, const Polygonal &h,
                            const Rational &L, const std::string &source)
{
	CatalogEntry e;
	e.name = name;
	e.description = desc;
	e.summable = polygonal_summable(h, name);
	e.function = e.summable->base();
	e.certificate = lipschitz_certificate(L);
	e.expected = h.integral();
	e.expected_source = source;
	return e;
}

CatalogEntry ae_step()
{
	Rational half(1, 2);
	RegularSeq dom = point_exclusion_seq({half}, "exclude(1/2)");
	AEFunction f;
	f.name = "ae-step";
	f.domain = dom;
	f.evaluator = [half](const DomainWitness &w) {
		Rational d = exclusion_distance(1, w.gamma);
		Rational x = w.x.approx(precision_for(d / 4));
		return embed(Rational(x < half ? 0 : 1));
	};
	/* ramp from 1/2 up to 1/2 + 2^{-n-3} */
	auto approx = [half](std::size_t n) {
		Rational w = pow2(-long(n) - 3);
		return Polygonal({0, half, half + w, 1}, {0, 0, 1, 1});
	};
	Summable::Hooks hk;
	hk.integral = [half](std::size_t n) -> Rational { return half - pow2(-long(n) - 4); };
	hk.step_l1 = [](std::size_t n) -> Rational { return pow2(-long(n) - 5); };
	CatalogEntry e;
	e.name = "ae-step";
	e.description = "0 on (0,1/2), 1 on (1/2,1), undefined at 1/2";
	e.function = f;
	e.summable = Summable(f, approx, dom, hk);
	/* nets at level >= 1 never straddle 1/2 */
	e.certificate = lipschitz_certificate(Rational(1));
	e.expected = half;
	e.expected_source = "length of (1/2,1)";
	return e;
}

CatalogEntry oscillating()
{
	RegularSeq dom = point_exclusion_seq({Rational(0)}, "exclude(0)");
	AEFunction f;
	f.name = "oscillating";
	f.domain = dom;
	f.evaluator = [](const DomainWitness &w) {
		Rational d = exclusion_distance(1, w.gamma);
		/* |f'| <= 2/x^3 + 1/x^2 <= 3/d^3 on [d, 1] */
		Rational L = 3 / (d * d * d);
		CReal x = w.x;
		return CReal([x, d, L](unsigned p) -> Rational {
			Rational q = x.approx(unsigned(long(p) + ceil_log2(L)));
			q = rmin(rmax(q, d), Rational(1));
			return tri(1 / q) / q;
		});
	};
	CatalogEntry e;
	e.name = "oscillating";
	e.description = "tri(1/x)/x, undefined at 0, not integrable";
	e.function = f;
	e.probe_only = true;
	return e;
}

CatalogEntry half_indicator()
{
	MeasurableSet X = interval_set(IntervalUnion({{Rational(1, 2), Rational(1)}}));
	CatalogEntry e;
	e.name = "half-indicator";
	e.description = "characteristic function of (1/2,1)";
	e.summable = X.characteristic;
	e.function = X.characteristic.base();
	e.expected = Rational(1, 2);
	e.expected_source = "length of (1/2,1)";
	return e;
}

} // namespace

std::vector<std::string> catalog_names()
{
	return {"identity", "square", "square-b", "tent", "constant", "ae-step", "pl3",
	        "half-indicator", "tents-series", "oscillating"};
}

CatalogEntry catalog_entry(const std::string &name)
{
	if (name == "identity")
		return from_polygonal(name, "f(x) = x", Polygonal::identity(), Rational(1), "triangle area");
	if (name == "tent")
		return from_polygonal(name, "tent with peak 1 at 1/2", Polygonal::tent(Rational(1, 2),
		                      Rational(1, 2), Rational(1)), Rational(2), "triangle area");
	if (name == "constant")
		return from_polygonal(name, "f(x) = 1", Polygonal::constant(Rational(1)), Rational(0),
		                      "constant");
	if (name == "pl3")
		return from_polygonal(name, "polygonal through (0,0) (1/3,1) (2/3,1/2) (1,1)",
		                      Polygonal({0, Rational(1, 3), Rational(2, 3), 1},
		                                {0, 1, Rational(1, 2), 1}),
		                      Rational(3), "trapezoid sum");
	if (name == "square" || name == "square-b") {
		CatalogEntry e;
		e.name = name;
		e.description = name == "square" ? "x^2, interpolants on 2^n pieces"
		                                 : "x^2, interpolants on 3 2^n pieces";
		e.summable = square_schedule(name == "square" ? 1 : 3);
		e.function = e.summable->base();
		e.certificate = lipschitz_certificate(Rational(2));
		e.expected = Rational(1, 3);
		e.expected_source = "closed form";
		return e;
	}
	if (name == "ae-step")
		return ae_step();
	if (name == "half-indicator")
		return half_indicator();
	if (name == "tents-series") {
		CatalogEntry e;
		e.name = name;
		e.description = "sum_j 2^-j tent_j over disjoint tents";
		e.summable = tents_series().limit;
		e.function = e.summable->base();
		e.expected = Rational(1, 6);
		e.expected_source = "geometric series";
		return e;
	}
	if (name == "oscillating")
		return oscillating();
	fail_input("unknown catalog function '" + name + "'");
}

} // namespace cmeasure
