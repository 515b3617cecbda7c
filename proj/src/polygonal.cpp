/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/polygonal.hpp>

#include <json.hpp>

#include <algorithm>

namespace cmeasure {

struct Polygonal::Data {
	std::vector<Rational> t, v;
	std::vector<Rational> cum; /* cum[i] = integral over [0, t_i] */
	Rational supp_lo, supp_hi;
	Rational vmin, vmax;
};

static bool collinear(const Rational &t0, const Rational &v0,
                      const Rational &t1, const Rational &v1,
                      const Rational &t2, const Rational &v2)
{
	return (v1 - v0) * (t2 - t1) == (v2 - v1) * (t1 - t0);
}

Polygonal Polygonal::build(std::vector<Rational> t, std::vector<Rational> v)
{
	if (t.size() != v.size() || t.size() < 2)
		fail_input("polygonal needs at least two breakpoints with values");
	if (t.front() != 0 || t.back() != 1)
		fail_input("polygonal breakpoints must start at 0 and end at 1");
	for (std::size_t i = 1; i < t.size(); ++i)
		if (!(t[i - 1] < t[i]))
			fail_input("polygonal breakpoints must be strictly increasing");

	auto d = std::make_shared<Data>();
	d->t.reserve(t.size());
	d->v.reserve(v.size());
	for (std::size_t i = 0; i < t.size(); ++i) {
		std::size_t n = d->t.size();
		if (n >= 2 && collinear(d->t[n - 2], d->v[n - 2], d->t[n - 1],
		                        d->v[n - 1], t[i], v[i])) {
			d->t[n - 1] = std::move(t[i]);
			d->v[n - 1] = std::move(v[i]);
		} else {
			d->t.push_back(std::move(t[i]));
			d->v.push_back(std::move(v[i]));
		}
	}

	const std::size_t M = d->t.size();
	d->cum.resize(M);
	d->cum[0] = 0;
	for (std::size_t i = 0; i + 1 < M; ++i)
		d->cum[i + 1] = d->cum[i] + (d->t[i + 1] - d->t[i]) * (d->v[i] + d->v[i + 1]) / 2;

	d->vmin = d->v[0];
	d->vmax = d->v[0];
	for (const auto &x : d->v) {
		if (x < d->vmin) d->vmin = x;
		if (x > d->vmax) d->vmax = x;
	}

	std::size_t lo = 0;
	while (lo < M && sgn(d->v[lo]) == 0)
		++lo;
	if (lo == M) {
		d->supp_lo = 1;
		d->supp_hi = 0;
	} else {
		std::size_t hi = M - 1;
		while (sgn(d->v[hi]) == 0)
			--hi;
		d->supp_lo = lo == 0 ? d->t[0] : d->t[lo - 1];
		d->supp_hi = hi == M - 1 ? d->t[M - 1] : d->t[hi + 1];
	}
	return Polygonal(std::shared_ptr<const Data>(std::move(d)));
}

Polygonal::Polygonal() : Polygonal(constant(Rational(0))) {}

Polygonal::Polygonal(std::vector<Rational> t, std::vector<Rational> v)
: Polygonal(build(std::move(t), std::move(v)))
{}

Polygonal Polygonal::constant(const Rational &c)
{
	return build({Rational(0), Rational(1)}, {c, c});
}

Polygonal Polygonal::identity()
{
	return build({Rational(0), Rational(1)}, {Rational(0), Rational(1)});
}

Polygonal Polygonal::tent(const Rational &c, const Rational &hw, const Rational &height)
{
	if (sgn(hw) <= 0)
		fail_input("tent halfwidth must be positive");
	std::vector<Rational> xs{Rational(0), Rational(c - hw), c, Rational(c + hw), Rational(1)};
	std::vector<Rational> t, v;
	std::sort(xs.begin(), xs.end());
	for (auto &x : xs) {
		if (x < 0 || x > 1 || (!t.empty() && t.back() == x))
			continue;
		Rational g = 1 - rabs(x - c) / hw;
		v.push_back(sgn(g) > 0 ? Rational(height * g) : Rational(0));
		t.push_back(x);
	}
	return build(std::move(t), std::move(v));
}

const std::vector<Rational> &Polygonal::breakpoints() const { return d_->t; }
const std::vector<Rational> &Polygonal::values() const { return d_->v; }

std::size_t Polygonal::segment(const Rational &x) const
{
	const auto &t = d_->t;
	auto it = std::upper_bound(t.begin(), t.end(), x);
	std::size_t i = it == t.begin() ? 0 : std::size_t(it - t.begin()) - 1;
	return std::min(i, t.size() - 2);
}

static Rational interp(const Rational &t0, const Rational &v0,
                       const Rational &t1, const Rational &v1, const Rational &x)
{
	if (x == t0) return v0;
	if (x == t1) return v1;
	return v0 + (v1 - v0) * (x - t0) / (t1 - t0);
}

Rational Polygonal::eval(const Rational &x) const
{
	if (x < 0 || x > 1)
		fail_input("evaluation point outside [0,1]: " + to_string(x));
	std::size_t i = segment(x);
	return interp(d_->t[i], d_->v[i], d_->t[i + 1], d_->v[i + 1], x);
}

Rational Polygonal::integral() const { return d_->cum.back(); }

Rational Polygonal::integral(const Rational &a, const Rational &b) const
{
	if (a < 0 || b > 1 || b < a)
		fail_input("integration window outside [0,1]");
	auto F = [this](const Rational &x) -> Rational {
		std::size_t i = segment(x);
		const Rational &t0 = d_->t[i];
		if (x == t0)
			return d_->cum[i];
		Rational fx = interp(t0, d_->v[i], d_->t[i + 1], d_->v[i + 1], x);
		return d_->cum[i] + (x - t0) * (d_->v[i] + fx) / 2;
	};
	if (b <= d_->supp_lo || a >= d_->supp_hi)
		return 0;
	return F(b) - F(a);
}

Rational Polygonal::min_value() const { return d_->vmin; }
Rational Polygonal::max_value() const { return d_->vmax; }
const Rational &Polygonal::support_lo() const { return d_->supp_lo; }
const Rational &Polygonal::support_hi() const { return d_->supp_hi; }
bool Polygonal::is_zero() const { return sgn(d_->vmin) == 0 && sgn(d_->vmax) == 0; }

Rational Polygonal::lipschitz() const
{
	Rational L = 0;
	for (std::size_t i = 0; i + 1 < d_->t.size(); ++i) {
		Rational s = rabs(d_->v[i + 1] - d_->v[i]) / (d_->t[i + 1] - d_->t[i]);
		if (s > L)
			L = s;
	}
	return L;
}

bool operator==(const Polygonal &a, const Polygonal &b)
{
	return a.d_ == b.d_ || (a.d_->t == b.d_->t && a.d_->v == b.d_->v);
}

class PolygonalOps {
public:
	static std::vector<Rational> merged_grid(const Polygonal &a, const Polygonal &b)
	{
		const auto &ta = a.breakpoints(), &tb = b.breakpoints();
		std::vector<Rational> g;
		g.reserve(ta.size() + tb.size());
		std::size_t i = 0, j = 0;
		while (i < ta.size() || j < tb.size()) {
			if (j == tb.size() || (i < ta.size() && ta[i] < tb[j])) {
				g.push_back(ta[i++]);
			} else if (i == ta.size() || tb[j] < ta[i]) {
				g.push_back(tb[j++]);
			} else {
				g.push_back(ta[i++]);
				++j;
			}
		}
		return g;
	}

	/* Values of h on a sorted grid that contains all of h's breakpoints. */
	static std::vector<Rational> resample(const Polygonal &h, const std::vector<Rational> &g)
	{
		const auto &t = h.breakpoints();
		const auto &v = h.values();
		std::vector<Rational> out;
		out.reserve(g.size());
		std::size_t i = 0;
		for (const auto &x : g) {
			while (i + 1 < t.size() && t[i + 1] <= x)
				++i;
			if (t[i] == x)
				out.push_back(v[i]);
			else
				out.push_back(interp(t[i], v[i], t[i + 1], v[i + 1], x));
		}
		return out;
	}

	/* Pointwise op on a common grid, inserting zeros of `sel` inside segments. */
	template <class Op>
	static Polygonal with_crossings(const std::vector<Rational> &g,
	                                const std::vector<Rational> &fa,
	                                const std::vector<Rational> &fb,
	                                const std::vector<Rational> &sel, Op op)
	{
		std::vector<Rational> t, v;
		t.reserve(g.size() + g.size() / 4);
		v.reserve(g.size() + g.size() / 4);
		for (std::size_t i = 0; i < g.size(); ++i) {
			if (i > 0) {
				int s0 = sgn(sel[i - 1]), s1 = sgn(sel[i]);
				if (s0 * s1 < 0) {
					Rational x = g[i - 1] + (g[i] - g[i - 1]) * sel[i - 1] / (sel[i - 1] - sel[i]);
					Rational a = interp(g[i - 1], fa[i - 1], g[i], fa[i], x);
					Rational b = interp(g[i - 1], fb[i - 1], g[i], fb[i], x);
					v.push_back(op(a, b));
					t.push_back(std::move(x));
				}
			}
			t.push_back(g[i]);
			v.push_back(op(fa[i], fb[i]));
		}
		return Polygonal::build(std::move(t), std::move(v));
	}
};

Polygonal lattice_linear(const Polygonal &h1, const Polygonal &h2, LatticeOp op, const Rational &c)
{
	switch (op) {
	case LatticeOp::scale: {
		std::vector<Rational> v;
		v.reserve(h1.size());
		for (const auto &x : h1.values())
			v.push_back(c * x);
		return Polygonal(h1.breakpoints(), std::move(v));
	}
	case LatticeOp::abs: {
		const auto &f = h1.values();
		return PolygonalOps::with_crossings(h1.breakpoints(), f, f, f,
			[](const Rational &a, const Rational &) { return rabs(a); });
	}
	default:
		break;
	}
	auto g = PolygonalOps::merged_grid(h1, h2);
	auto fa = PolygonalOps::resample(h1, g);
	auto fb = PolygonalOps::resample(h2, g);
	std::vector<Rational> v;
	switch (op) {
	case LatticeOp::add:
	case LatticeOp::sub:
		v.reserve(g.size());
		for (std::size_t i = 0; i < g.size(); ++i)
			v.push_back(op == LatticeOp::add ? Rational(fa[i] + fb[i]) : Rational(fa[i] - fb[i]));
		return Polygonal(std::move(g), std::move(v));
	case LatticeOp::min:
	case LatticeOp::max: {
		std::vector<Rational> d(g.size());
		for (std::size_t i = 0; i < g.size(); ++i)
			d[i] = fa[i] - fb[i];
		if (op == LatticeOp::min)
			return PolygonalOps::with_crossings(g, fa, fb, d,
				[](const Rational &a, const Rational &b) { return rmin(a, b); });
		return PolygonalOps::with_crossings(g, fa, fb, d,
			[](const Rational &a, const Rational &b) { return rmax(a, b); });
	}
	default:
		fail_input("unknown lattice op");
	}
}

Polygonal operator+(const Polygonal &a, const Polygonal &b) { return lattice_linear(a, b, LatticeOp::add); }
Polygonal operator-(const Polygonal &a, const Polygonal &b) { return lattice_linear(a, b, LatticeOp::sub); }
Polygonal operator*(const Rational &c, const Polygonal &a) { return lattice_linear(a, a, LatticeOp::scale, c); }
Polygonal abs(const Polygonal &a) { return lattice_linear(a, a, LatticeOp::abs); }
Polygonal min(const Polygonal &a, const Polygonal &b) { return lattice_linear(a, b, LatticeOp::min); }
Polygonal max(const Polygonal &a, const Polygonal &b) { return lattice_linear(a, b, LatticeOp::max); }

Rational l1_distance(const Polygonal &a, const Polygonal &b)
{
	auto g = PolygonalOps::merged_grid(a, b);
	auto fa = PolygonalOps::resample(a, g);
	auto fb = PolygonalOps::resample(b, g);
	Rational total = 0, d0 = fa[0] - fb[0], d1;
	for (std::size_t i = 1; i < g.size(); ++i) {
		d1 = fa[i] - fb[i];
		Rational dt = g[i] - g[i - 1];
		if (sgn(d0) * sgn(d1) >= 0)
			total += dt * rabs(d0 + d1) / 2;
		else
			total += dt * (d0 * d0 + d1 * d1) / (2 * (rabs(d0) + rabs(d1)));
		d0 = d1;
	}
	return total;
}

IntervalUnion::IntervalUnion(std::vector<Interval> parts)
{
	std::vector<Interval> ps;
	for (auto &p : parts) {
		Rational lo = rmax(p.lo, Rational(0)), hi = rmin(p.hi, Rational(1));
		if (lo < hi)
			ps.push_back({lo, hi});
	}
	std::sort(ps.begin(), ps.end(), [](const Interval &a, const Interval &b) { return a.lo < b.lo; });
	for (auto &p : ps) {
		if (!parts_.empty() && p.lo < parts_.back().hi) {
			if (p.hi > parts_.back().hi)
				parts_.back().hi = p.hi;
		} else {
			parts_.push_back(std::move(p));
		}
	}
}

IntervalUnion IntervalUnion::unit() { return IntervalUnion({{Rational(0), Rational(1)}}); }

Rational IntervalUnion::length() const
{
	Rational s = 0;
	for (const auto &p : parts_)
		s += p.hi - p.lo;
	return s;
}

bool IntervalUnion::contains(const Rational &x) const
{
	auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
		[](const Rational &y, const Interval &p) { return y < p.hi; });
	return it != parts_.end() && it->lo < x && x < it->hi;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion &o) const
{
	std::vector<Interval> out;
	std::size_t i = 0, j = 0;
	while (i < parts_.size() && j < o.parts_.size()) {
		const auto &a = parts_[i], &b = o.parts_[j];
		const Rational &lo = rmax(a.lo, b.lo), &hi = rmin(a.hi, b.hi);
		if (lo < hi)
			out.push_back({lo, hi});
		if (a.hi < b.hi) ++i; else ++j;
	}
	IntervalUnion r;
	r.parts_ = std::move(out);
	return r;
}

IntervalUnion IntervalUnion::intersect(const Rational &lo, const Rational &hi) const
{
	std::vector<Interval> out;
	auto it = std::upper_bound(parts_.begin(), parts_.end(), lo,
		[](const Rational &y, const Interval &p) { return y < p.hi; });
	for (; it != parts_.end() && it->lo < hi; ++it) {
		const Rational &a = rmax(it->lo, lo), &b = rmin(it->hi, hi);
		if (a < b)
			out.push_back({a, b});
	}
	IntervalUnion r;
	r.parts_ = std::move(out);
	return r;
}

Rational IntervalUnion::length_in(const Rational &lo, const Rational &hi) const
{
	Rational s = 0;
	auto it = std::upper_bound(parts_.begin(), parts_.end(), lo,
		[](const Rational &y, const Interval &p) { return y < p.hi; });
	for (; it != parts_.end() && it->lo < hi; ++it) {
		const Rational &a = rmax(it->lo, lo), &b = rmin(it->hi, hi);
		if (a < b)
			s += b - a;
	}
	return s;
}

std::vector<Rational> IntervalUnion::endpoints() const
{
	std::vector<Rational> e;
	for (const auto &p : parts_) {
		if (e.empty() || e.back() != p.lo)
			e.push_back(p.lo);
		e.push_back(p.hi);
	}
	return e;
}

IntervalUnion sublevel(const Polygonal &h, const Rational &theta)
{
	if (sgn(theta) <= 0)
		fail_input("sublevel threshold must be positive");
	const auto &t = h.breakpoints();
	const auto &v = h.values();
	std::vector<Interval> out;
	bool open = false;
	Rational start;
	for (std::size_t i = 0; i + 1 < t.size(); ++i) {
		const Rational &a = v[i], &b = v[i + 1];
		bool ina = a < theta, inb = b < theta;
		if (ina && inb) {
			if (!open) { open = true; start = t[i]; }
		} else if (ina) {
			Rational r = t[i] + (theta - a) * (t[i + 1] - t[i]) / (b - a);
			if (!open) start = t[i];
			out.push_back({start, r});
			open = false;
		} else if (inb) {
			start = t[i] + (a - theta) * (t[i + 1] - t[i]) / (a - b);
			open = true;
		}
	}
	if (open)
		out.push_back({start, Rational(1)});
	return IntervalUnion(std::move(out));
}

namespace {

struct PointList {
	std::vector<Rational> t, v;
	void add(const Rational &x, const Rational &y)
	{
		if (!t.empty() && t.back() == x)
			return;
		t.push_back(x);
		v.push_back(y);
	}
	Polygonal finish()
	{
		if (t.empty() || t.front() != 0) {
			t.insert(t.begin(), Rational(0));
			v.insert(v.begin(), Rational(0));
		}
		if (t.back() != 1)
			add(Rational(1), Rational(0));
		return Polygonal(std::move(t), std::move(v));
	}
};

} // namespace

Polygonal indicator_approx(const Rational &lo, const Rational &hi, unsigned j)
{
	if (!(0 <= lo && lo < hi && hi <= 1))
		fail_input("indicator interval must satisfy 0 <= lo < hi <= 1");
	Rational w = (hi - lo) * pow2(-long(j) - 2);
	PointList pl;
	pl.add(lo, Rational(0));
	pl.add(lo + w, Rational(1));
	pl.add(hi - w, Rational(1));
	pl.add(hi, Rational(0));
	return pl.finish();
}

Polygonal indicator_approx(const DyadicInterval &I, unsigned j)
{
	return indicator_approx(I.left(), I.right(), j);
}

Polygonal indicator_approx(const IntervalUnion &U, unsigned j)
{
	PointList pl;
	Rational scale = pow2(-long(j) - 2);
	for (const auto &p : U.parts()) {
		Rational w = (p.hi - p.lo) * scale;
		pl.add(p.lo, Rational(0));
		pl.add(p.lo + w, Rational(1));
		pl.add(p.hi - w, Rational(1));
		pl.add(p.hi, Rational(0));
	}
	return pl.finish();
}

Polygonal step_approx(const std::vector<Rational> &coeffs, unsigned m, unsigned j)
{
	if (coeffs.size() != (std::size_t(1) << m))
		fail_input("step_approx needs 2^m coefficients");
	const std::size_t n = coeffs.size();
	Rational h = pow2(-long(m));
	Rational w = h * pow2(-long(j) - 2);
	std::vector<Rational> t, v;
	t.reserve(3 * n + 1);
	v.reserve(3 * n + 1);
	t.emplace_back(0);
	v.emplace_back(0);
	Rational left = 0;
	for (std::size_t l = 0; l < n; ++l) {
		Rational right = Rational(Integer(static_cast<unsigned long>(l + 1))) * h;
		t.push_back(left + w);
		v.push_back(coeffs[l]);
		t.push_back(right - w);
		v.push_back(coeffs[l]);
		t.push_back(right);
		v.emplace_back(0);
		left = std::move(right);
	}
	return Polygonal(std::move(t), std::move(v));
}

std::string to_json(const Polygonal &h)
{
	nlohmann::json a = nlohmann::json::array();
	for (std::size_t i = 0; i < h.size(); ++i)
		a.push_back({to_string(h.breakpoints()[i]), to_string(h.values()[i])});
	return a.dump();
}

Polygonal polygonal_from_json(const std::string &text)
{
	nlohmann::json a;
	try {
		a = nlohmann::json::parse(text);
	} catch (const nlohmann::json::exception &e) {
		fail_input(std::string("polygonal JSON: ") + e.what());
	}
	if (!a.is_array())
		fail_input("polygonal JSON must be an array of [t, v] pairs");
	std::vector<Rational> t, v;
	for (const auto &pr : a) {
		if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
			fail_input("polygonal JSON entries must be [\"t\", \"v\"] string pairs");
		t.push_back(parse_rational(pr[0].get<std::string>()));
		v.push_back(parse_rational(pr[1].get<std::string>()));
	}
	return Polygonal(std::move(t), std::move(v));
}

} // namespace cmeasure
