/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/budget.hpp>
#include <cmeasure/riemann.hpp>

#include <map>
#include <mutex>
#include <random>
#include <tuple>

namespace cmeasure {

/* ---- nets -------------------------------------------------------------- */

NetIndex NetIndex::canonical(unsigned m, unsigned n)
{
	NetIndex a;
	a.m = m;
	a.cells.resize(std::size_t(1) << m);
	for (std::size_t l = 0; l < a.cells.size(); ++l)
		a.cells[l] = {l, m, n};
	return a;
}

void NetIndex::validate() const
{
	if (m >= 40)
		fail_input("net level too deep");
	if (cells.size() != (std::size_t(1) << m))
		fail_input("net index needs 2^m cells");
	for (std::size_t l = 0; l < cells.size(); ++l) {
		const NetCell &c = cells[l];
		if (c.m < m || c.m >= 63 || c.k >= (std::uint64_t(1) << c.m))
			fail_input("net cell " + std::to_string(l) + " has an invalid tag");
		/* l 2^-m <= k 2^-m_l < (l+1) 2^-m */
		if ((c.k >> (c.m - m)) != l)
			fail_input("net cell " + std::to_string(l) + " tag lies outside its cell");
	}
}

RiemannCertificate lipschitz_certificate(const Rational &L, unsigned n)
{
	Rational slope = L + Rational(1, 4);
	return {[slope, n](const Rational &eps) {
		if (sgn(eps) <= 0)
			fail_input("certificate needs eps > 0");
		unsigned m = 1;
		while (!(slope * pow2(-long(m)) < eps))
			++m;
		return NetIndex::canonical(m, n);
	}};
}

Rational step_l1_distance(const std::vector<Rational> &a, unsigned ma,
                          const std::vector<Rational> &b, unsigned mb)
{
	if (ma > mb)
		return step_l1_distance(b, mb, a, ma);
	Rational s = 0;
	unsigned shift = mb - ma;
	for (std::size_t l = 0; l < b.size(); ++l)
		s += rabs(a[l >> shift] - b[l]);
	return s * pow2(-long(mb));
}

/* ---- bridge state ------------------------------------------------------ */

using CellKey = std::tuple<std::uint64_t, unsigned, unsigned>;

struct Bridge::Impl {
	AEFunction f;
	mutable std::recursive_mutex mu;
	std::map<unsigned, IntervalUnion> delta;
	std::map<std::pair<unsigned, unsigned>, IntervalUnion> prefix;
	std::map<unsigned, Rational> witness_bound;
	std::map<CellKey, Rational> theta_est;
	std::map<CellKey, std::unique_ptr<DomainWitness>> zeta;
	std::map<std::tuple<std::uint64_t, unsigned, unsigned, unsigned>, Rational> coeff;
};

Bridge::Bridge(AEFunction f) : impl_(std::make_shared<Impl>())
{
	impl_->f = std::move(f);
}

const AEFunction &Bridge::function() const { return impl_->f; }

const IntervalUnion &Bridge::delta_union(unsigned n) const
{
	std::lock_guard lk(impl_->mu);
	auto it = impl_->delta.find(n);
	if (it != impl_->delta.end())
		return it->second;
	const RegularSeq &h = impl_->f.domain;
	IntervalUnion U = h.is_zero() ? IntervalUnion::unit()
	                              : sublevel(h.term(n), rpow(Rational(2, 3), n));
	return impl_->delta.emplace(n, std::move(U)).first->second;
}

Rational Bridge::delta_defect(unsigned n) const { return 1 - delta_union(n).length(); }

const IntervalUnion &Bridge::gamma_prefix(unsigned n, unsigned K) const
{
	std::lock_guard lk(impl_->mu);
	auto key = std::make_pair(n, K);
	auto it = impl_->prefix.find(key);
	if (it != impl_->prefix.end())
		return it->second;
	IntervalUnion U = K <= n ? delta_union(n) : gamma_prefix(n, K - 1).intersect(delta_union(K));
	return impl_->prefix.emplace(key, std::move(U)).first->second;
}

Rational Bridge::gamma_tail(unsigned K) { return 4 * rpow(Rational(3, 4), K + 1); }

Rational Bridge::gamma_lower_bound(unsigned n, unsigned K) const
{
	Rational s = 1;
	for (unsigned k = n; k <= K; ++k)
		s -= delta_defect(k);
	return s - gamma_tail(K);
}

Rational Bridge::gamma_witness_bound(unsigned n) const
{
	std::lock_guard lk(impl_->mu);
	auto it = impl_->witness_bound.find(n);
	if (it != impl_->witness_bound.end())
		return it->second;
	Rational s = 3 * rpow(Rational(2, 3), n);
	const RegularSeq &h = impl_->f.domain;
	if (!h.is_zero())
		for (unsigned k = 0; k < n; ++k)
			s += h.term(k).max_value();
	return impl_->witness_bound.emplace(n, s).first->second;
}

/* smallest K >= n with gamma_tail(K) <= bound */
static unsigned tail_index(unsigned n, const Rational &bound)
{
	unsigned K = n;
	Rational t = Bridge::gamma_tail(K);
	while (t > bound) {
		t *= Rational(3, 4);
		++K;
	}
	return K;
}

static void check_cell(std::uint64_t k, unsigned m)
{
	if (m >= 63 || k >= (std::uint64_t(1) << m))
		fail_input("cell index k must satisfy k < 2^m");
}

Rational Bridge::theta_estimate(std::uint64_t k, unsigned m, unsigned n) const
{
	check_cell(k, m);
	std::lock_guard lk(impl_->mu);
	CellKey key{k, m, n};
	auto it = impl_->theta_est.find(key);
	if (it != impl_->theta_est.end())
		return it->second;
	Rational quarter = pow2(-2 * long(m)) / 4;
	unsigned K = tail_index(n, quarter);
	DyadicInterval I(k, m);
	/* mes(I cap Gamma_n) lies in [L - tail, L] */
	Rational L = gamma_prefix(n, K).length_in(I.left(), I.right());
	Rational est = L - gamma_tail(K) / 2;
	return impl_->theta_est.emplace(key, est).first->second;
}

bool Bridge::theta(std::uint64_t k, unsigned m, unsigned n) const
{
	return theta_estimate(k, m, n) > pow2(-2 * long(m)) / 2;
}

DomainWitness Bridge::gamma_point(std::uint64_t k, unsigned m, unsigned n) const
{
	check_cell(k, m);
	DyadicInterval I(k, m);
	unsigned K = tail_index(n, pow2(-2 * long(m)) / 256);
	IntervalUnion U = gamma_prefix(n, K).intersect(I.left(), I.right());
	if (U.parts().empty())
		fail_certification("cell (" + std::to_string(k) + "," + std::to_string(m)
		                   + ") has no certified part inside Gamma_" + std::to_string(n));
	Rational C = pow2(long(m) + 3);
	Polygonal h = C * indicator_approx(U, 1);
	const RegularSeq &dom = impl_->f.domain;
	SeqView view;
	if (!dom.is_zero())
		view = SeqView(dom, K + 1, C * rpow(Rational(3, 2), K + 1), Rational(3, 2));
	RealizeOptions opt;
	opt.first_eps_exp = 3;
	opt.lo = I.left();
	opt.hi = I.right();
	Realization r = realize_point(h, view, 0, opt);
	return {r.xi, gamma_witness_bound(n)};
}

static DomainWitness domain_point(const RegularSeq &dom, std::uint64_t k, unsigned m)
{
	DyadicInterval I(k, m);
	std::size_t K0 = m + 4;
	Rational S = dom.tail(K0);
	if (!dom.is_zero())
		for (std::size_t j = 0; j <= K0; ++j)
			S += dom.term(j).integral(I.left(), I.right());
	Rational C = 2;
	if (sgn(S) > 0) {
		Rational need = 2 * S * pow2(long(m));
		if (need > C)
			C = pow2(ceil_log2(need));
	}
	Polygonal h = C * indicator_approx(I, 1);
	RealizeOptions opt;
	opt.lo = I.left();
	opt.hi = I.right();
	Realization r = realize_point(h, SeqView(dom), K0, opt);
	return {r.xi, C};
}

const DomainWitness &Bridge::zeta(std::uint64_t k, unsigned m, unsigned n) const
{
	check_cell(k, m);
	std::lock_guard lk(impl_->mu);
	CellKey key{k, m, n};
	auto it = impl_->zeta.find(key);
	if (it != impl_->zeta.end())
		return *it->second;
	DomainWitness w = theta(k, m, n) ? gamma_point(k, m, n)
	                                 : domain_point(impl_->f.domain, k, m);
	return *impl_->zeta.emplace(key, std::make_unique<DomainWitness>(std::move(w))).first->second;
}

Rational Bridge::coefficient(std::uint64_t k, unsigned m, unsigned n, unsigned bits) const
{
	std::lock_guard lk(impl_->mu);
	auto key = std::make_tuple(k, m, n, bits);
	auto it = impl_->coeff.find(key);
	if (it != impl_->coeff.end())
		return it->second;
	Rational c = dyadic_approx(impl_->f(zeta(k, m, n)), bits);
	return impl_->coeff.emplace(key, c).first->second;
}

std::size_t Bridge::zeta_count() const
{
	std::lock_guard lk(impl_->mu);
	return impl_->zeta.size();
}

/* ---- sets -------------------------------------------------------------- */

MeasurableSet build_delta(const Bridge &b, unsigned n)
{
	return interval_set(b.delta_union(n));
}

GammaSet build_gamma(const Bridge &b, unsigned n, unsigned K)
{
	if (K < n)
		fail_input("build_gamma needs K >= n");
	/* exact defects up to K, geometric bound (3/4)^k beyond */
	auto defect = [b, K, n](std::size_t i) -> Rational {
		unsigned k = n + unsigned(i);
		return k <= K ? b.delta_defect(k) : rpow(Rational(3, 4), k);
	};
	auto tail = [b, K, n](std::size_t N) -> Rational {
		unsigned last = n + unsigned(N);
		Rational s = 0;
		for (unsigned k = last + 1; k <= K; ++k)
			s += b.delta_defect(k);
		return s + Bridge::gamma_tail(std::max(K, last));
	};
	SetIntersection si = countable_set_intersection(
		[b, n](std::size_t i) { return build_delta(b, n + unsigned(i)); }, defect, tail);
	return {si.set, b.gamma_lower_bound(n, K)};
}

bool theta_membership(const Bridge &b, std::uint64_t k, unsigned m, unsigned n)
{
	return b.theta(k, m, n);
}

DomainWitness sample_zeta(const Bridge &b, std::uint64_t k, unsigned m, unsigned n)
{
	return b.zeta(k, m, n);
}

/* ---- net functions ----------------------------------------------------- */

static std::vector<Rational> net_coefficients(const Bridge &b, const NetIndex &alpha)
{
	std::vector<Rational> c;
	c.reserve(alpha.cells.size());
	for (const auto &cell : alpha.cells)
		c.push_back(b.coefficient(cell.k, cell.m, cell.n, alpha.m + 4));
	return c;
}

static Summable step_summable(std::shared_ptr<const std::vector<Rational>> c, unsigned m)
{
	std::vector<Rational> grid;
	grid.reserve(c->size() + 1);
	for (std::size_t l = 0; l <= c->size(); ++l)
		grid.push_back(Rational(Integer(static_cast<unsigned long>(l))) * pow2(-long(m)));
	RegularSeq dom = point_exclusion_seq(std::move(grid), "grid");
	Rational sum = 0, abssum = 0;
	for (const auto &x : *c) {
		sum += x;
		abssum += rabs(x);
	}
	Rational cell = pow2(-long(m));
	AEFunction f;
	f.domain = dom;
	f.name = "net";
	f.evaluator = [c, m](const DomainWitness &w) {
		Rational d = exclusion_distance(c->size() + 1, w.gamma);
		Rational x = w.x.approx(precision_for(d / 4)) * pow2(long(m));
		Integer l = rfloor(x);
		if (l < 0) l = 0;
		if (l >= Integer(static_cast<unsigned long>(c->size())))
			l = Integer(static_cast<unsigned long>(c->size() - 1));
		return embed((*c)[l.get_ui()]);
	};
	Summable::Hooks hk;
	hk.integral = [sum, cell](std::size_t j) -> Rational { return sum * cell * (1 - pow2(-long(j) - 2)); };
	hk.step_l1 = [abssum, cell](std::size_t j) -> Rational { return abssum * cell * pow2(-long(j) - 3); };
	return Summable(f, [c, m](std::size_t j) { return step_approx(*c, m, unsigned(j)); }, dom, hk);
}

NetFunction net_function(const Bridge &b, const NetIndex &alpha)
{
	alpha.validate();
	auto c = std::make_shared<const std::vector<Rational>>(net_coefficients(b, alpha));
	return {alpha, *c, step_summable(c, alpha.m), pow2(-long(alpha.m) - 4)};
}

static NetIndex random_after(const NetIndex &alpha, std::mt19937_64 &rng)
{
	NetIndex a;
	a.m = alpha.m + 1 + unsigned(rng() % 2);
	a.cells.resize(std::size_t(1) << a.m);
	for (std::size_t l = 0; l < a.cells.size(); ++l) {
		unsigned dm = unsigned(rng() % 3);
		std::uint64_t sub = rng() % (std::uint64_t(1) << dm);
		a.cells[l] = {(std::uint64_t(l) << dm) + sub, a.m + dm, 3 + unsigned(rng() % 2)};
	}
	return a;
}

ProbeReport mean_cauchy_probe(const Bridge &b, const NetIndex &alpha, std::size_t trials,
                              std::uint64_t seed)
{
	alpha.validate();
	std::mt19937_64 rng(seed);
	ProbeReport r{Rational(0), pow2(-long(alpha.m) - 3), trials};
	for (std::size_t t = 0; t < trials; ++t) {
		NetIndex a1 = random_after(alpha, rng);
		NetIndex a2 = random_after(alpha, rng);
		Rational d = step_l1_distance(net_coefficients(b, a1), a1.m, net_coefficients(b, a2), a2.m);
		if (d > r.max_l1)
			r.max_l1 = d;
	}
	return r;
}

/* ---- conversion -------------------------------------------------------- */

Conversion convert_to_lebesgue(const Bridge &b, const RiemannCertificate &cert)
{
	struct Nets {
		Bridge b;
		RiemannCertificate cert;
		std::mutex mu;
		std::map<std::size_t, std::unique_ptr<NetFunction>> memo;

		Nets(Bridge b_, RiemannCertificate c_) : b(std::move(b_)), cert(std::move(c_)) {}

		const NetFunction &get(std::size_t j)
		{
			{
				std::lock_guard lk(mu);
				auto it = memo.find(j);
				if (it != memo.end())
					return *it->second;
			}
			NetIndex a = cert.modulus(pow2(-long(j) - 1));
			if (j > 0 && a.m < get(j - 1).index.m)
				fail_certification("certificate nets are not directed at j = " + std::to_string(j));
			auto nf = std::make_unique<NetFunction>(net_function(b, a));
			std::lock_guard lk(mu);
			return *memo.emplace(j, std::move(nf)).first->second;
		}
	};
	auto nets = std::make_shared<Nets>(b, cert);
	PairBound pb = [nets](std::size_t j) {
		const NetFunction &a = nets->get(j);
		const NetFunction &c = nets->get(j + 1);
		return step_l1_distance(a.coeffs, a.index.m, c.coeffs, c.index.m);
	};
	Summable g = limit_of_summables([nets](std::size_t j) { return nets->get(j).summable; }, pb);
	return {g, [nets](std::size_t j) -> const NetFunction & { return nets->get(j); }};
}

/* ---- equality sampling ------------------------------------------------- */

EqualityReport equality_region_check(const Bridge &b, unsigned n, std::size_t S, unsigned q,
                                     std::uint64_t seed, const Rational &offset)
{
	const Budget &bud = Budget::current();
	EqualityReport rep;
	rep.n = n;
	auto coeffs = [&b, n](unsigned m) { return net_coefficients(b, NetIndex::canonical(m, n)); };

	/* strictly increasing m_k >= n with integral |g_{k+1} - g_k| < 2^-k */
	const unsigned K = q + 1;
	rep.ladder.push_back(n);
	std::vector<Rational> prev = coeffs(n);
	for (unsigned k = 0; k < K; ++k) {
		unsigned m0 = rep.ladder.back();
		unsigned m = m0 + 1;
		for (;; ++m) {
			if (m - m0 > bud.ladder)
				fail_budget("ladder level search exceeded budget at k = " + std::to_string(k));
			std::vector<Rational> cur = coeffs(m);
			Rational d = step_l1_distance(prev, m0, cur, m);
			if (d < pow2(-long(k))) {
				rep.ladder.push_back(m);
				rep.ladder_l1.push_back(d);
				prev = std::move(cur);
				break;
			}
		}
	}
	const unsigned top = rep.ladder.back();
	rep.ladder_integral = 0;
	for (const auto &c : prev)
		rep.ladder_integral += c;
	rep.ladder_integral *= pow2(-long(top));

	std::mt19937_64 rng(seed);
	const std::uint64_t cells = std::uint64_t(1) << top;
	std::size_t attempts = 0;
	while (rep.samples < S) {
		if (++attempts > 64 * S + 64)
			fail_budget("not enough Theta-positive cells found for sampling");
		std::uint64_t l = rng() % cells;
		if (!b.theta(l, top, n))
			continue;
		std::uint64_t sk = (l << 3) + rng() % 8;
		if (!b.theta(sk, top + 3, n))
			continue;
		DomainWitness w = b.gamma_point(sk, top + 3, n);
		Rational fx = dyadic_approx(b.function()(w), q + 2);
		Rational gx = prev[l] + offset;
		++rep.samples;
		if (rabs(fx - gx) <= pow2(-long(q)))
			++rep.passed;
		rep.sample_points.push_back(dyadic_approx(w.x, q + 4));
	}
	return rep;
}

} // namespace cmeasure
