/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/budget.hpp>
#include <cmeasure/regular_seq.hpp>

#include <deque>
#include <map>
#include <mutex>

namespace cmeasure {

struct RegularSeq::Impl {
	Generator gen;
	Rational scale{1};
	std::string name;
	bool zero = false;
	std::mutex mu;
	std::deque<std::unique_ptr<Polygonal>> memo;
};

static const Polygonal &zero_polygonal()
{
	static const Polygonal z;
	return z;
}

RegularSeq::RegularSeq() : impl_(std::make_shared<Impl>())
{
	impl_->zero = true;
	impl_->name = "zero";
}

RegularSeq::RegularSeq(Generator gen, Rational scale, std::string name)
: impl_(std::make_shared<Impl>())
{
	if (sgn(scale) <= 0 || scale > 1)
		fail_input("regular sequence scale must lie in (0, 1]");
	impl_->gen = std::move(gen);
	impl_->scale = std::move(scale);
	impl_->name = std::move(name);
}

const Polygonal &RegularSeq::term(std::size_t n) const
{
	if (impl_->zero)
		return zero_polygonal();
	{
		std::lock_guard lk(impl_->mu);
		if (n < impl_->memo.size() && impl_->memo[n])
			return *impl_->memo[n];
	}
	Polygonal p = impl_->gen(n);
	if (sgn(p.min_value()) < 0)
		fail_certification(impl_->name + ": term " + std::to_string(n) + " is negative somewhere");
	if (!(p.integral() < bound(n)))
		fail_certification(impl_->name + ": term " + std::to_string(n) + " has integral "
		                   + to_string(p.integral()) + ", not below " + to_string(bound(n)));
	std::lock_guard lk(impl_->mu);
	if (impl_->memo.size() <= n)
		impl_->memo.resize(n + 1);
	if (!impl_->memo[n])
		impl_->memo[n] = std::make_unique<Polygonal>(std::move(p));
	return *impl_->memo[n];
}

Rational RegularSeq::bound(std::size_t n) const { return impl_->scale * pow2(-long(n)); }
Rational RegularSeq::tail(std::size_t K) const
{
	return impl_->zero ? Rational(0) : Rational(impl_->scale * pow2(-long(K)));
}
const Rational &RegularSeq::scale() const { return impl_->scale; }
const std::string &RegularSeq::name() const { return impl_->name; }
bool RegularSeq::is_zero() const { return impl_->zero; }

void RegularSeq::check_prefix(std::size_t N) const
{
	for (std::size_t n = 0; n <= N; ++n) {
		const Polygonal &p = term(n);
		if (sgn(p.min_value()) < 0 || !(p.integral() < bound(n)))
			fail_certification(impl_->name + ": regularity fails at term " + std::to_string(n));
	}
}

WitnessCheck verify_witness(const RegularSeq &seq, const DomainWitness &w, std::size_t M, unsigned p)
{
	Rational x = rat_approx(w.x, p);
	if (x < 0) x = 0;
	if (x > 1) x = 1;
	WitnessCheck r;
	r.prefix_sum = 0;
	r.error = 0;
	if (seq.is_zero())
		return r;
	Rational e = pow2(-long(p));
	for (std::size_t n = 0; n <= M; ++n) {
		const Polygonal &h = seq.term(n);
		/* a term vanishing near x contributes nothing, exactly */
		if (h.support_hi() <= x - e || h.support_lo() >= x + e)
			continue;
		r.prefix_sum += h.eval(x);
		r.error += h.lipschitz() * e;
	}
	r.ok = r.prefix_sum - r.error <= w.gamma;
	return r;
}

Rational SeqView::weight(std::size_t n) const
{
	return weight0 * rpow(ratio, n);
}

Rational SeqView::c() const
{
	return weight0 * base.scale() * pow2(-long(offset));
}

namespace {

/* sum_{n>K} c q^n = c q^{K+1} / (1-q) */
Rational geometric_tail(const Rational &c, const Rational &q, std::size_t K)
{
	return c * rpow(q, K + 1) / (1 - q);
}

struct Bisection {
	Polygonal h;
	SeqView view;
	Rational eps;
	Rational q;
	Rational len0;
	std::size_t K;
	Rational T;        /* certified tail beyond K */
	Rational delta;    /* certified lower bound for the kept interval */
	std::vector<Rational> los;
	std::mutex mu;

	/* sum_{n<=upto} (1+eps)^n view_n integrated over [a,b]. Coefficients are
	 * formed only for terms whose support meets [a,b]. */
	Rational weighted_mass(const Rational &a, const Rational &b, std::size_t upto)
	{
		Rational s = 0;
		if (view.base.is_zero())
			return s;
		Rational growth = view.ratio * (1 + eps);
		for (std::size_t n = 0; n <= upto; ++n) {
			const Polygonal &t = view.base.term(view.offset + n);
			if (t.support_hi() <= a || t.support_lo() >= b)
				continue;
			s += view.weight0 * rpow(growth, n) * t.integral(a, b);
		}
		return s;
	}

	void extend(std::size_t depth)
	{
		const Budget &bud = Budget::current();
		if (depth > bud.depth)
			fail_budget("bisection depth " + std::to_string(depth) + " exceeds budget");
		while (los.size() <= depth) {
			std::size_t s = los.size() - 1;
			Rational len = len0 * pow2(-long(s));
			const Rational &lo = los.back();
			Rational mid = lo + len / 2;
			Rational quarter = delta / 4;
			while (T >= quarter) {
				++K;
				T *= q;
				if (K > bud.terms)
					fail_budget("prefix needed for bisection exceeds budget");
			}
			Rational PL = h.integral(lo, mid) - eps * len / 2 - weighted_mass(lo, mid, K);
			if (PL - T >= quarter)
				los.push_back(lo);
			else
				los.push_back(mid);
			delta = quarter;
		}
	}

	Rational midpoint(std::size_t depth)
	{
		std::lock_guard lk(mu);
		extend(depth);
		return los[depth] + len0 * pow2(-long(depth) - 1);
	}
};

} // namespace

Rational realize_margin(const Polygonal &h, const SeqView &view, std::size_t N,
                        const RealizeOptions &opt)
{
	const Rational &lo = opt.lo, &hi = opt.hi;
	if (!(0 <= lo && lo < hi && hi <= 1))
		fail_input("realize_point start interval must satisfy 0 <= lo < hi <= 1");
	Rational s = h.integral(lo, hi);
	if (view.base.is_zero())
		return s;
	if (!(view.r() < 1))
		fail_input("realize_point needs a geometrically decaying sequence");
	Rational w = view.weight0;
	for (std::size_t n = 0; n <= N; ++n) {
		const Polygonal &t = view.base.term(view.offset + n);
		if (!(t.support_hi() <= lo || t.support_lo() >= hi))
			s -= w * t.integral(lo, hi);
		w *= view.ratio;
	}
	return s - geometric_tail(view.c(), view.r(), N);
}

Realization realize_point(const Polygonal &h, const SeqView &view, std::size_t N,
                          const RealizeOptions &opt)
{
	const Rational &lo = opt.lo, &hi = opt.hi;
	if (!(0 <= lo && lo < hi && hi <= 1))
		fail_input("realize_point start interval must satisfy 0 <= lo < hi <= 1");
	Rational len = hi - lo;
	Rational c = view.c(), r = view.r();
	if (!(r < 1))
		fail_input("realize_point needs a geometrically decaying sequence");
	const bool zero = view.base.is_zero();

	auto mass = [&](std::size_t upto, const Rational &eps) {
		Rational s = 0, w = view.weight0;
		if (zero)
			return s;
		for (std::size_t n = 0; n <= upto; ++n) {
			const Polygonal &t = view.base.term(view.offset + n);
			if (!(t.support_hi() <= lo || t.support_lo() >= hi))
				s += w * t.integral(lo, hi);
			w *= view.ratio * (1 + eps);
		}
		return s;
	};

	Rational hmass = h.integral(lo, hi);
	Rational pre = realize_margin(h, view, N, opt);
	if (sgn(pre) <= 0)
		fail_certification("realize_point: hypothesis margin insufficient at prefix "
		                   + std::to_string(N) + " (margin " + to_string(pre) + ")");

	const Budget &bud = Budget::current();
	auto st = std::make_shared<Bisection>();
	bool found = false;
	std::size_t K = N;
	for (unsigned i = opt.first_eps_exp; i < opt.first_eps_exp + bud.eps_halvings; ++i) {
		Rational eps = pow2(-long(i));
		Rational q = r * (1 + eps);
		K += opt.prefix_step;
		if (!(q < 1))
			continue;
		Rational T = zero ? Rational(0) : geometric_tail(c, q, K);
		Rational P = hmass - eps * len - mass(K, eps);
		if (P - T > 0) {
			st->eps = eps;
			st->q = q;
			st->K = K;
			st->T = T;
			st->delta = P - T;
			found = true;
			break;
		}
	}
	if (!found)
		fail_budget("realize_point: no epsilon found within budget");

	st->h = h;
	st->view = view;
	st->len0 = len;
	st->los.push_back(lo);

	Realization out;
	out.margin = st->eps;
	out.sum_bound = h.max_value() - st->eps;
	out.prefix = K;
	out.lo = lo;
	out.hi = hi;
	long shift = ceil_log2(len);
	out.xi = CReal([st, shift](unsigned p) -> Rational {
		long s = long(p) + shift;
		return st->midpoint(s < 0 ? 0 : std::size_t(s));
	});
	return out;
}

DomainWitness point_in_pps(const RegularSeq &seq)
{
	Realization r = realize_point(Polygonal::constant(Rational(2)), SeqView(seq), 0);
	return {r.xi, Rational(2)};
}

RegularSeq intersect_countable(const SeqFamily &family)
{
	struct Rows {
		SeqFamily fam;
		std::mutex mu;
		std::map<std::size_t, RegularSeq> memo;
		RegularSeq get(std::size_t n)
		{
			{
				std::lock_guard lk(mu);
				auto it = memo.find(n);
				if (it != memo.end())
					return it->second;
			}
			RegularSeq r = fam.row(n);
			std::lock_guard lk(mu);
			return memo.emplace(n, r).first->second;
		}
	};
	auto rows = std::make_shared<Rows>();
	rows->fam = family;
	return RegularSeq([rows](std::size_t k) {
		Polygonal acc;
		std::size_t last = std::min(k, rows->fam.count == 0 ? 0 : rows->fam.count - 1);
		if (rows->fam.count == 0)
			return acc;
		for (std::size_t n = 0; n <= last; ++n) {
			RegularSeq row = rows->get(n);
			if (row.is_zero())
				continue;
			const Polygonal *t;
			try {
				t = &row.term(k - n);
			} catch (const Error &e) {
				fail_certification("intersection row " + std::to_string(n) + ", term "
				                   + std::to_string(k - n) + ": " + e.what());
			}
			if (t->is_zero())
				continue;
			acc = acc + pow2(-2 * long(n) - 1) * *t;
		}
		return acc;
	}, Rational(1), "intersection");
}

RegularSeq intersect_pair(const RegularSeq &a, const RegularSeq &b)
{
	return intersect_countable({[a, b](std::size_t n) { return n == 0 ? a : b; }, 2});
}

DomainWitness intersect_transport(const DomainWitness &w, std::size_t n)
{
	return {w.x, w.gamma * pow2(2 * long(n) + 1)};
}

RegularSeq geometric_decay(const RegularSeq &seq)
{
	if (seq.is_zero())
		return RegularSeq();
	return RegularSeq([seq](std::size_t n) {
		Rational a = rpow(Rational(4, 3), 2 * n) / 2;
		Rational b = rpow(Rational(4, 3), 2 * n + 1) / 2;
		return a * seq.term(2 * n) + b * seq.term(2 * n + 1);
	}, Rational(1), "decay(" + seq.name() + ")");
}

Rational decay_transport(const Rational &gamma, std::size_t n)
{
	return 2 * gamma * rpow(Rational(3, 4), n);
}

} // namespace cmeasure
