/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/ae_function.hpp>
#include <cmeasure/budget.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>

namespace cmeasure {

/* ---- Summable ---------------------------------------------------------- */

struct Summable::Impl {
	AEFunction base;
	Approx approx;
	RegularSeq agreement;
	RegularSeq witness;
	enum { same, agreement_only, combined } mode = same;
	Hooks hooks;
	std::mutex mu;
	std::deque<std::unique_ptr<Polygonal>> memo;
	std::size_t steps_checked = 0; /* steps i < steps_checked verified */
};

Summable::Summable(AEFunction base, Approx approx, RegularSeq agreement, Hooks hooks)
: impl_(std::make_shared<Impl>())
{
	impl_->base = std::move(base);
	impl_->approx = std::move(approx);
	impl_->agreement = std::move(agreement);
	impl_->hooks = std::move(hooks);
	const RegularSeq &dom = impl_->base.domain;
	if (impl_->agreement.is_zero() || impl_->agreement.same_as(dom)) {
		impl_->witness = dom;
		impl_->mode = Impl::same;
	} else if (dom.is_zero()) {
		impl_->witness = impl_->agreement;
		impl_->mode = Impl::agreement_only;
	} else {
		impl_->witness = intersect_pair(dom, impl_->agreement);
		impl_->mode = Impl::combined;
	}
}

const AEFunction &Summable::base() const { return impl_->base; }
const RegularSeq &Summable::agreement() const { return impl_->agreement; }
const RegularSeq &Summable::witness_seq() const { return impl_->witness; }

DomainWitness Summable::to_domain_witness(const DomainWitness &w) const
{
	switch (impl_->mode) {
	case Impl::same: return w;
	case Impl::agreement_only: return {w.x, Rational(0)};
	default: return intersect_transport(w, 0);
	}
}

static void check_step(const std::string &name, std::size_t i, const Rational &l1)
{
	if (!(l1 < pow2(-long(i))))
		fail_certification(name + ": integral |f_" + std::to_string(i + 1) + " - f_"
		                   + std::to_string(i) + "| = " + to_string(l1) + " is not below 2^-"
		                   + std::to_string(i));
}

const Polygonal &Summable::approx(std::size_t n) const
{
	{
		std::lock_guard lk(impl_->mu);
		if (n < impl_->memo.size() && impl_->memo[n])
			return *impl_->memo[n];
	}
	Polygonal p = impl_->approx(n);
	if (n > 0) {
		Rational l1 = impl_->hooks.step_l1 ? impl_->hooks.step_l1(n - 1)
		                                   : l1_distance(p, approx(n - 1));
		check_step(impl_->base.name, n - 1, l1);
	}
	std::lock_guard lk(impl_->mu);
	if (impl_->memo.size() <= n)
		impl_->memo.resize(n + 1);
	if (!impl_->memo[n])
		impl_->memo[n] = std::make_unique<Polygonal>(std::move(p));
	return *impl_->memo[n];
}

Rational Summable::step_l1(std::size_t n) const
{
	if (impl_->hooks.step_l1)
		return impl_->hooks.step_l1(n);
	return l1_distance(approx(n + 1), approx(n));
}

Rational Summable::approx_integral(std::size_t n) const
{
	if (!impl_->hooks.integral)
		return approx(n).integral();
	std::size_t done;
	{
		std::lock_guard lk(impl_->mu);
		done = impl_->steps_checked;
	}
	for (std::size_t i = done; i < n; ++i)
		check_step(impl_->base.name, i, step_l1(i));
	{
		std::lock_guard lk(impl_->mu);
		impl_->steps_checked = std::max(impl_->steps_checked, n);
	}
	return impl_->hooks.integral(n);
}

Rational lebesgue_integral(const Summable &F, unsigned p)
{
	return F.approx_integral(p + 2);
}

IntegralReport lebesgue_integral_report(const Summable &F, unsigned p)
{
	return {lebesgue_integral(F, p), std::size_t(p) + 2, pow2(-long(p) - 1)};
}

bool integral_uniqueness_check(const Summable &F1, const Summable &F2, unsigned p)
{
	return rabs(lebesgue_integral(F1, p) - lebesgue_integral(F2, p)) <= pow2(2 - long(p));
}

/* Oscillation max - min of h over [a,b]. */
static Rational local_oscillation(const Polygonal &h, const Rational &a, const Rational &b)
{
	const auto &t = h.breakpoints();
	const auto &v = h.values();
	Rational lo = h.eval(a), hi = lo;
	auto see = [&](const Rational &y) {
		if (y < lo) lo = y;
		if (y > hi) hi = y;
	};
	see(h.eval(b));
	auto it = std::upper_bound(t.begin(), t.end(), a);
	for (; it != t.end() && *it < b; ++it)
		see(v[std::size_t(it - t.begin())]);
	return hi - lo;
}

CReal eval_at(const Polygonal &h, const CReal &x)
{
	auto clamp = [](Rational q) {
		if (q < 0) return Rational(0);
		if (q > 1) return Rational(1);
		return q;
	};
	if (const Rational *e = x.exact())
		return CReal(h.eval(clamp(*e)));
	Rational L = h.lipschitz();
	unsigned extra = L > 1 ? unsigned(ceil_log2(L)) : 0;
	/* refine x only until h varies by at most 2^-p around it; the global
	 * Lipschitz precision p + extra always suffices */
	return CReal([h, x, extra, clamp](unsigned p) -> Rational {
		Rational tol = pow2(-long(p));
		for (unsigned q = p + 1; q < p + extra; q += 2) {
			Rational xa = x.approx(q), r = pow2(-long(q));
			if (local_oscillation(h, clamp(xa - r), clamp(xa + r)) <= tol)
				return h.eval(clamp(xa));
		}
		return h.eval(clamp(x.approx(p + extra)));
	});
}

/* ---- positive points --------------------------------------------------- */

PositivePoint positive_point(const Summable &F, std::size_t N, const RealizeOptions &opt)
{
	const RegularSeq &H = F.witness_seq();
	for (std::size_t m = 1; m <= N; ++m) {
		Polygonal fm = F.approx(m);
		Rational hm = pow2(-long(m));
		RegularSeq hp([F, H, m, hm](std::size_t k) {
			Polygonal d = abs(F.approx(m + k + 1) - F.approx(m + k));
			if (H.is_zero())
				return d;
			return d + hm * H.term(k);
		}, pow2(1 - long(m)), F.base().name + ".positive_majorant");
		SeqView view(hp);
		if (sgn(realize_margin(fm, view, N, opt)) <= 0)
			continue;
		Realization r = realize_point(fm, view, N, opt);
		PositivePoint out;
		out.seq_witness = {r.xi, pow2(long(m)) * rmax(fm.max_value(), Rational(0))};
		out.witness = F.to_domain_witness(out.seq_witness);
		out.lower_bound = r.margin;
		out.index = m;
		return out;
	}
	fail_certification(F.base().name + ": no positive margin found up to prefix "
	                   + std::to_string(N));
}

/* ---- limit theorem ----------------------------------------------------- */

namespace {

struct SummableMemo {
	std::function<Summable(std::size_t)> seq;
	std::mutex mu;
	std::map<std::size_t, Summable> memo;

	Summable get(std::size_t n)
	{
		{
			std::lock_guard lk(mu);
			auto it = memo.find(n);
			if (it != memo.end())
				return it->second;
		}
		Summable s = seq(n);
		std::lock_guard lk(mu);
		return memo.emplace(n, s).first->second;
	}
};

PairBound pair_bound_from(std::shared_ptr<SummableMemo> m)
{
	return [m](std::size_t n) -> Rational {
		Rational b;
		for (std::size_t k = n + 3; k <= n + 12; ++k) {
			b = l1_distance(m->get(n + 1).approx(k), m->get(n).approx(k)) + pow2(2 - long(k));
			if (b < pow2(-long(n)))
				return b;
		}
		return b;
	};
}

} // namespace

PairBound approximant_pair_bound(std::function<Summable(std::size_t)> seq)
{
	auto m = std::make_shared<SummableMemo>();
	m->seq = std::move(seq);
	return pair_bound_from(m);
}

Summable limit_of_summables(std::function<Summable(std::size_t)> seq, PairBound pair_bound)
{
	struct State {
		std::shared_ptr<SummableMemo> fs;
		PairBound bound;
		std::mutex mu;
		std::size_t certified = 0; /* pairs n < certified verified */

		void certify(std::size_t upto)
		{
			std::size_t from;
			{
				std::lock_guard lk(mu);
				from = certified;
			}
			for (std::size_t n = from; n <= upto; ++n) {
				Rational b = bound(n);
				if (!(b < pow2(-long(n))))
					fail_certification("limit: integral |F_" + std::to_string(n + 1) + " - F_"
					                   + std::to_string(n) + "| not certified below 2^-"
					                   + std::to_string(n) + " (bound " + to_string(b) + ")");
			}
			std::lock_guard lk(mu);
			certified = std::max(certified, upto + 1);
		}
		const Polygonal &f(std::size_t n, std::size_t k) { return fs->get(n).approx(k); }
		const Polygonal &diag(std::size_t n)
		{
			certify(n + 1);
			return f(n + 2, n + 2);
		}
	};
	auto st = std::make_shared<State>();
	st->fs = std::make_shared<SummableMemo>();
	st->fs->seq = std::move(seq);
	st->bound = pair_bound ? std::move(pair_bound) : pair_bound_from(st->fs);

	RegularSeq X = intersect_countable({[st](std::size_t n) {
		return st->fs->get(n).witness_seq();
	}});
	RegularSeq Y = geometric_decay(RegularSeq([st](std::size_t n) {
		Polygonal acc;
		for (std::size_t k = 0; k <= n + 2; ++k)
			acc = acc + abs(st->f(n + 2 - k, n + 4 + k) - st->f(n + 2 - k, n + 2 + k));
		return acc;
	}, Rational(1), "limit.cross"));
	RegularSeq Z = geometric_decay(RegularSeq([st](std::size_t n) {
		return abs(st->diag(n + 1) - st->diag(n));
	}, Rational(1), "limit.diagonal"));
	RegularSeq agreement = intersect_countable({[X, Y, Z](std::size_t j) {
		return j == 0 ? X : (j == 1 ? Y : Z);
	}, 3});

	AEFunction base;
	base.domain = agreement;
	base.name = "limit";
	base.evaluator = [st](const DomainWitness &w) -> CReal {
		/* row 2 of the agreement controls the diagonal increments */
		Rational gz = intersect_transport(w, 2).gamma;
		CReal x = w.x;
		return CReal([st, gz, x](unsigned p) -> Rational {
			Rational target = pow2(-long(p) - 1);
			std::size_t N = 0;
			Rational err = 8 * gz;
			while (err > target) {
				err *= Rational(3, 4);
				++N;
			}
			return eval_at(st->diag(N), x).approx(p + 1);
		});
	};
	return Summable(base, [st](std::size_t n) { return st->diag(n); }, agreement);
}

/* ---- null integrals ---------------------------------------------------- */

RegularSeq ae_zero_of_null_integral(const Summable &F, unsigned depth)
{
	const std::string &name = F.base().name;
	for (std::size_t k = 0; k <= depth + 2; ++k) {
		const Polygonal &fk = F.approx(k);
		Rational neg = (l1_distance(fk, Polygonal()) - fk.integral()) / 2;
		if (neg > pow2(1 - long(k)))
			fail_certification(name + ": not nonnegative (negative part " + to_string(neg)
			                   + " at approximant " + std::to_string(k) + ")");
	}
	/* G_i = 2^i F with approximants 2^i f_{k+i}. */
	auto scaled = [F](std::size_t i) {
		Rational c = pow2(long(i));
		AEFunction b;
		b.domain = F.base().domain;
		b.name = F.base().name + "*2^" + std::to_string(i);
		b.evaluator = [F, c](const DomainWitness &w) { return scale(F(w), c); };
		Summable::Hooks hk;
		hk.integral = [F, c, i](std::size_t k) -> Rational { return c * F.approx_integral(k + i); };
		hk.step_l1 = [F, c, i](std::size_t k) -> Rational { return c * F.step_l1(k + i); };
		return Summable(b, [F, c, i](std::size_t k) { return c * F.approx(k + i); },
		                F.agreement(), hk);
	};
	/* integral |G_{i+1} - G_i| = 2^i integral |F| <= 2^i (integral |f_j| + 2^{1-j}) */
	PairBound pb = [F](std::size_t i) -> Rational {
		std::size_t j = 2 * i + 3;
		return pow2(long(i)) * (l1_distance(F.approx(j), Polygonal()) + pow2(1 - long(j)));
	};
	for (std::size_t i = 0; i <= depth; ++i)
		if (!(pb(i) < pow2(-long(i))))
			fail_certification(name + ": null integral not certified at level " + std::to_string(i));
	Summable L = limit_of_summables(scaled, pb);
	if (F.base().domain.is_zero())
		return L.agreement();
	return intersect_pair(F.base().domain, L.agreement());
}

/* ---- measurable sets --------------------------------------------------- */

Rational measure(const MeasurableSet &X, unsigned p)
{
	return lebesgue_integral(X.characteristic, p);
}

bool is_binary_value(const CReal &v)
{
	Rational a = v.approx(3);
	Rational e(1, 8);
	return rabs(a) <= e || rabs(a - 1) <= e;
}

PositivePoint point_in_positive_set(const MeasurableSet &X, std::size_t N, const RealizeOptions &opt)
{
	PositivePoint pp = positive_point(X.characteristic, N, opt);
	CReal v = X.characteristic(pp.witness);
	if (!is_binary_value(v) || v.approx(3) < Rational(7, 8))
		fail_certification(X.characteristic.base().name + ": realized point has characteristic value "
		                   + to_string(v.approx(3)));
	return pp;
}

RegularSeq full_measure_to_pps(const MeasurableSet &X, unsigned depth)
{
	const Summable &chi = X.characteristic;
	for (unsigned p = 0; p <= depth; ++p)
		if (measure(X, p) < 1 - pow2(2 - long(p)))
			fail_certification(chi.base().name + ": full measure not certified at precision "
			                   + std::to_string(p));
	AEFunction b;
	b.domain = chi.base().domain;
	b.name = "1-" + chi.base().name;
	b.evaluator = [chi](const DomainWitness &w) {
		return max(embed(Rational(1)) - chi(w), embed(Rational(0)));
	};
	Summable G(b, [chi](std::size_t k) {
		return max(Polygonal::constant(Rational(1)) - chi.approx(k), Polygonal());
	}, chi.agreement());
	return ae_zero_of_null_integral(G, depth);
}

/* ---- interval sets and point exclusion --------------------------------- */

static Polygonal tents_at(const std::vector<Rational> &pts, const Rational &w, const Rational &H)
{
	bool disjoint = true;
	for (std::size_t i = 1; i < pts.size(); ++i)
		if (pts[i] - pts[i - 1] <= 2 * w)
			disjoint = false;
	if (!disjoint) {
		Polygonal acc;
		for (const auto &a : pts)
			acc = acc + Polygonal::tent(a, w, H);
		return acc;
	}
	std::vector<Rational> t, v;
	auto add = [&](const Rational &x, const Rational &y) {
		if (x < 0 || x > 1 || (!t.empty() && !(t.back() < x)))
			return;
		t.push_back(x);
		v.push_back(y);
	};
	auto value = [&](const Rational &x, const Rational &a) {
		Rational g = 1 - rabs(x - a) / w;
		return sgn(g) > 0 ? Rational(H * g) : Rational(0);
	};
	if (pts.empty() || pts.front() - w > 0)
		add(Rational(0), Rational(0));
	for (const auto &a : pts) {
		Rational l = a - w, r = a + w;
		if (l < 0)
			add(Rational(0), value(Rational(0), a));
		else
			add(l, Rational(0));
		add(a, H);
		if (r > 1)
			add(Rational(1), value(Rational(1), a));
		else
			add(r, Rational(0));
	}
	if (t.back() != 1)
		add(Rational(1), Rational(0));
	return Polygonal(std::move(t), std::move(v));
}

RegularSeq point_exclusion_seq(std::vector<Rational> points, std::string name)
{
	if (points.empty())
		return RegularSeq();
	std::sort(points.begin(), points.end());
	points.erase(std::unique(points.begin(), points.end()), points.end());
	auto pts = std::make_shared<const std::vector<Rational>>(std::move(points));
	Rational e(Integer(static_cast<unsigned long>(pts->size())));
	/* height 2^n, halfwidth 2^{-2n-1}/e: integral below 2^{-n-1} */
	return RegularSeq([pts, e](std::size_t n) {
		return tents_at(*pts, pow2(-2 * long(n) - 1) / e, pow2(long(n)));
	}, Rational(1), std::move(name));
}

Rational exclusion_distance(std::size_t npoints, const Rational &gamma)
{
	long n = gamma <= Rational(1, 2) ? 0 : ceil_log2(gamma) + 1;
	Rational e(Integer(static_cast<unsigned long>(npoints)));
	return pow2(-2 * n - 2) / e;
}

MeasurableSet interval_set(const IntervalUnion &U)
{
	auto ends = U.endpoints();
	std::size_t ne = ends.size();
	RegularSeq dom = point_exclusion_seq(ends, "endpoints");
	Rational len = U.length();
	AEFunction b;
	b.domain = dom;
	b.name = "chi";
	b.evaluator = [U, ne](const DomainWitness &w) {
		if (ne == 0)
			return embed(Rational(0));
		Rational d = exclusion_distance(ne, w.gamma);
		Rational x = w.x.approx(precision_for(d / 4));
		return embed(Rational(U.contains(x) ? 1 : 0));
	};
	Summable::Hooks hk;
	hk.integral = [len](std::size_t j) -> Rational { return len * (1 - pow2(-long(j) - 2)); };
	hk.step_l1 = [len](std::size_t j) -> Rational { return len * pow2(-long(j) - 3); };
	return {Summable(b, [U](std::size_t j) { return indicator_approx(U, unsigned(j)); }, dom, hk)};
}

/* ---- countable intersection -------------------------------------------- */

SetIntersection countable_set_intersection(std::function<MeasurableSet(std::size_t)> sets,
                                           std::function<Rational(std::size_t)> defect,
                                           std::function<Rational(std::size_t)> defect_tail)
{
	struct State {
		std::function<MeasurableSet(std::size_t)> sets;
		std::function<Rational(std::size_t)> tail;
		std::mutex mu;
		std::map<std::size_t, Summable> chars;
		std::vector<std::size_t> cut; /* cut[i] = N_i */

		Summable chi(std::size_t n)
		{
			{
				std::lock_guard lk(mu);
				auto it = chars.find(n);
				if (it != chars.end())
					return it->second;
			}
			Summable s = sets(n).characteristic;
			std::lock_guard lk(mu);
			return chars.emplace(n, s).first->second;
		}
		/* smallest N with tail(N) < 2^{-i-3} */
		std::size_t N(std::size_t i)
		{
			std::lock_guard lk(mu);
			while (cut.size() <= i) {
				std::size_t j = cut.size();
				std::size_t n = j == 0 ? 0 : cut.back();
				Rational target = pow2(-long(j) - 3);
				while (!(tail(n) < target)) {
					if (++n > Budget::current().terms)
						fail_budget("defect series does not fall below 2^-"
						            + std::to_string(j + 3) + " within budget");
				}
				cut.push_back(n);
			}
			return cut[i];
		}
	};
	auto st = std::make_shared<State>();
	st->sets = std::move(sets);
	st->tail = defect_tail;

	auto partial = [st](std::size_t i) {
		std::size_t count = st->N(i) + 1;
		std::size_t shift = std::size_t(ceil_log2(Rational(Integer(static_cast<unsigned long>(count))))) + 1;
		RegularSeq W = intersect_countable({[st](std::size_t n) {
			return st->chi(n).witness_seq();
		}, count});
		AEFunction b;
		b.domain = W;
		b.name = "partial_intersection";
		b.evaluator = [st, count](const DomainWitness &w) {
			CReal v;
			for (std::size_t n = 0; n < count; ++n) {
				Summable c = st->chi(n);
				CReal cn = c(c.to_domain_witness(intersect_transport(w, n)));
				v = n == 0 ? cn : min(v, cn);
			}
			return v;
		};
		return Summable(b, [st, count, shift](std::size_t k) {
			Polygonal acc = st->chi(0).approx(k + shift);
			for (std::size_t n = 1; n < count; ++n)
				acc = min(acc, st->chi(n).approx(k + shift));
			return acc;
		}, W);
	};
	PairBound pb = [st](std::size_t i) { return st->tail(st->N(i)); };

	auto lower = [defect, defect_tail](std::size_t K) -> Rational {
		Rational s = 1;
		for (std::size_t n = 0; n <= K; ++n)
			s -= defect(n);
		return s - defect_tail(K);
	};
	return {{limit_of_summables(partial, pb)}, lower};
}

} // namespace cmeasure
