/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/commands.hpp>

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

namespace cmeasure {

namespace {

using Json = nlohmann::ordered_json;

std::string rs(const Rational &q) { return to_string(q); }
std::string rs(std::size_t n) { return to_string(Rational(Integer(static_cast<unsigned long>(n)))); }

std::string csv_field(const std::string &s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
		return s;
	std::string out = "\"";
	for (char c : s) {
		if (c == '"')
			out += '"';
		out += c;
	}
	return out + "\"";
}

class Stopwatch {
public:
	Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
	std::string ms() const
	{
		auto d = std::chrono::steady_clock::now() - t0_;
		auto n = std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
		return rs(std::size_t(n));
	}

private:
	std::chrono::steady_clock::time_point t0_;
};

void add_timing(Report &r, const RunOptions &opt, const Stopwatch &sw)
{
	if (opt.timings)
		r.json["timings"] = {{"elapsed_ms", sw.ms()}};
}

CatalogEntry entry_or_fail(const std::string &name) { return catalog_entry(name); }

/* ---- random instances for the suites ----------------------------------- */

/* Breakpoints on the 1/64 grid, integer values in [lo, hi] over 4. */
Polygonal random_polygonal(std::mt19937_64 &rng, int lo, int hi)
{
	unsigned pieces = 1 + unsigned(rng() % 6);
	std::vector<unsigned> cuts;
	while (cuts.size() + 1 < pieces) {
		unsigned c = 1 + unsigned(rng() % 63);
		if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
			cuts.push_back(c);
	}
	std::sort(cuts.begin(), cuts.end());
	std::vector<Rational> t{Rational(0)}, v;
	for (unsigned c : cuts)
		t.push_back(make_rational(long(c), 64));
	t.push_back(Rational(1));
	for (std::size_t i = 0; i < t.size(); ++i)
		v.push_back(make_rational(lo + long(rng() % unsigned(hi - lo + 1)), 4));
	return Polygonal(std::move(t), std::move(v));
}

/* Row i, term k: nonnegative with integral exactly 2^{-k-2}. */
Polygonal family_term(std::uint64_t seed, std::size_t i, std::size_t k)
{
	std::mt19937_64 rng(seed * 1000003u + i * 1009u + k);
	Polygonal r = random_polygonal(rng, 0, 8);
	Rational I = r.integral();
	if (sgn(I) == 0)
		return Polygonal::constant(pow2(-long(k) - 2));
	return (pow2(-long(k) - 2) / I) * r;
}

SeqFamily random_family(std::uint64_t seed)
{
	return {[seed](std::size_t i) {
		return RegularSeq([seed, i](std::size_t k) { return family_term(seed, i, k); },
		                  Rational(1, 2), "family" + std::to_string(i));
	}, 3};
}

/* Full-width tents at 1/2 with integral 2^{-n-2}. */
RegularSeq half_tents()
{
	return RegularSeq([](std::size_t n) {
		return Polygonal::tent(Rational(1, 2), Rational(1, 2), pow2(-long(n) - 1));
	}, Rational(1), "tents(1/2)");
}

/* ---- suite bookkeeping ------------------------------------------------- */

class Suite {
public:
	explicit Suite(std::string name) : name_(std::move(name)) {}

	template <class F>
	void check(const std::string &what, F &&f)
	{
		Json c;
		c["check"] = what;
		try {
			std::string detail;
			bool ok = f(detail);
			c["passed"] = ok;
			c["detail"] = detail;
			ok_ = ok_ && ok;
		} catch (const Error &e) {
			c["passed"] = false;
			c["detail"] = std::string("error: ") + e.what();
			ok_ = false;
		}
		checks_.push_back(std::move(c));
	}

	Report report(std::uint64_t seed, bool corrupted) const
	{
		Report r;
		r.ok = ok_;
		r.json["command"] = "verify";
		r.json["inputs"] = {{"suite", name_}, {"seed", std::to_string(seed)},
		                    {"corrupted_catalog", corrupted}};
		std::size_t passed = 0;
		Json failed = Json::array();
		for (const auto &c : checks_) {
			if (c["passed"].get<bool>())
				++passed;
			else
				failed.push_back(c["check"]);
		}
		r.json["result"] = {{"passed", ok_}, {"checks_passed", rs(passed)},
		                    {"checks_total", rs(checks_.size())}, {"failed", failed}};
		r.json["checks"] = checks_;
		r.csv_header = {"check", "passed", "detail"};
		for (const auto &c : checks_)
			r.csv_rows.push_back({c["check"].get<std::string>(),
			                      c["passed"].get<bool>() ? "true" : "false",
			                      c["detail"].get<std::string>()});
		return r;
	}

private:
	std::string name_;
	bool ok_ = true;
	Json checks_ = Json::array();
};

CatalogEntry suite_entry(const std::string &name, bool corrupted)
{
	CatalogEntry e = catalog_entry(name);
	if (!corrupted)
		return e;
	if (name == "ae-step") {
		/* integral 2^-n is not strictly below 2^-n */
		e.function.domain = RegularSeq([](std::size_t n) {
			return Polygonal::tent(Rational(1, 2), pow2(-long(n)), Rational(1));
		}, Rational(1), "corrupted exclude(1/2)");
	} else if (name == "identity") {
		e.function.evaluator = [](const DomainWitness &w) {
			return w.x + embed(Rational(1, 4));
		};
		e.expected = Rational(1, 3);
	}
	return e;
}

/* ---- suites ------------------------------------------------------------ */

void suite_regularity(Suite &s, std::uint64_t seed, bool corrupted)
{
	for (const auto &name : catalog_names()) {
		CatalogEntry e = suite_entry(name, corrupted);
		if (e.function.domain.is_zero())
			continue;
		s.check("domain-regular:" + name, [&](std::string &d) {
			e.function.domain.check_prefix(8);
			d = "terms 0..8 nonnegative with integral below 2^-n";
			return true;
		});
	}
	s.check("decay-formula", [](std::string &d) {
		RegularSeq h([](std::size_t n) { return Polygonal::constant(pow2(-long(n) - 1)); });
		RegularSeq g = geometric_decay(h);
		for (std::size_t n = 0; n <= 20; ++n) {
			Rational I = g.term(n).integral();
			if (!(I <= Rational(5, 6) * rpow(Rational(4, 9), n) && I < pow2(-long(n)))) {
				d = "fails at n = " + std::to_string(n);
				return false;
			}
		}
		d = "integral g_n <= (5/6)(4/9)^n < 2^-n for n <= 20";
		return true;
	});
	s.check("intersection-regular", [seed](std::string &d) {
		intersect_countable(random_family(seed)).check_prefix(12);
		d = "3-row random family, terms 0..12";
		return true;
	});
	s.check("sublevel-chebyshev", [seed](std::string &d) {
		std::mt19937_64 rng(seed);
		for (int i = 0; i < 50; ++i) {
			Polygonal h = random_polygonal(rng, 0, 8);
			Rational theta = make_rational(long(1 + rng() % 8), 4);
			IntervalUnion U = sublevel(h, theta);
			if (U.length() < 1 - h.integral() / theta) {
				d = "length bound fails on instance " + std::to_string(i);
				return false;
			}
			for (const auto &I : U.parts())
				if (!(h.eval((I.lo + I.hi) / 2) < theta)) {
					d = "midpoint not strictly below theta on instance " + std::to_string(i);
					return false;
				}
		}
		d = "50 random instances";
		return true;
	});
}

void suite_witnesses(Suite &s, std::uint64_t seed, bool corrupted)
{
	for (const auto &name : {"ae-step", "oscillating", "half-indicator"}) {
		CatalogEntry e = suite_entry(name, corrupted);
		s.check(std::string("pps-point:") + name, [&](std::string &d) {
			DomainWitness w = point_in_pps(e.function.domain);
			WitnessCheck c = verify_witness(e.function.domain, w, 20, 40);
			d = "prefix sum " + rs(c.prefix_sum) + " with error " + rs(c.error)
			    + " against gamma " + rs(w.gamma);
			return c.ok;
		});
	}
	s.check("realize-tents", [](std::string &d) {
		RegularSeq h = half_tents();
		Realization r = realize_point(Polygonal::constant(Rational(1)), SeqView(h), 6);
		Rational x = r.xi.approx(40), e = pow2(-40);
		Rational sum = 0, err = 0, w = 1;
		for (std::size_t n = 0; n <= 25; ++n) {
			const Polygonal &t = h.term(n);
			if (!(t.support_hi() <= x - e || t.support_lo() >= x + e)) {
				sum += w * t.eval(x);
				err += w * t.lipschitz() * e;
			}
			w *= 1 + r.margin;
		}
		d = "weighted prefix " + rs(sum) + " + " + rs(err) + " vs " + rs(1 - r.margin);
		return sum + err <= 1 - r.margin;
	});
	s.check("transport", [seed](std::string &d) {
		SeqFamily fam = random_family(seed);
		DomainWitness w = point_in_pps(intersect_countable(fam));
		for (std::size_t n = 0; n < 3; ++n) {
			WitnessCheck c = verify_witness(fam.row(n), intersect_transport(w, n), 12, 40);
			if (!c.ok) {
				d = "row " + std::to_string(n) + " exceeds the transported bound";
				return false;
			}
		}
		d = "rows 0..2, terms 0..12";
		return true;
	});
	s.check("positive-point:ae-step", [corrupted](std::string &d) {
		CatalogEntry e = suite_entry("ae-step", corrupted);
		PositivePoint pp = positive_point(*e.summable, 8);
		Rational v = pp.witness.x.approx(20);
		Rational fx = (*e.summable)(pp.witness).approx(10);
		d = "point near " + rs(floor_dyadic(v, 20)) + ", lower bound " + rs(pp.lower_bound);
		return fx + pow2(-10) >= pp.lower_bound && sgn(pp.lower_bound) > 0;
	});
}

void suite_integrals(Suite &s, std::uint64_t seed, bool corrupted)
{
	const unsigned p = 12;
	for (const auto &name : catalog_names()) {
		CatalogEntry e = suite_entry(name, corrupted);
		if (!e.summable || !e.expected)
			continue;
		s.check("integral:" + name, [&](std::string &d) {
			Rational v = lebesgue_integral(*e.summable, p);
			d = "value " + rs(v) + ", expected " + rs(*e.expected) + " (" + e.expected_source + ")";
			return rabs(v - *e.expected) <= pow2(-long(p));
		});
	}
	s.check("uniqueness:square", [](std::string &d) {
		d = "two interpolation schedules within 2^-8";
		return integral_uniqueness_check(square_schedule(1), square_schedule(3), 10);
	});
	s.check("linearity", [seed](std::string &d) {
		std::mt19937_64 rng(seed);
		for (int i = 0; i < 100; ++i) {
			Polygonal a = random_polygonal(rng, -8, 8), b = random_polygonal(rng, -8, 8);
			Rational x = make_rational(long(rng() % 17) - 8, 3), y = make_rational(long(rng() % 17) - 8, 5);
			if ((x * a + y * b).integral() != x * a.integral() + y * b.integral()) {
				d = "fails on instance " + std::to_string(i);
				return false;
			}
			if (rabs(a.integral()) > abs(a).integral()) {
				d = "|integral| exceeds integral of |h| on instance " + std::to_string(i);
				return false;
			}
		}
		d = "100 random pairs, exact";
		return true;
	});
	s.check("limit-continuity", [](std::string &d) {
		TentsSeries t = tents_series();
		Rational v = lebesgue_integral(t.limit, p);
		for (std::size_t n = 0; n <= 8; ++n)
			if (rabs(v - t.partial_integral(n)) > pow2(1 - long(n)) + pow2(-long(p))) {
				d = "fails at n = " + std::to_string(n);
				return false;
			}
		d = "tents series, n <= 8";
		return true;
	});
	s.check("measure:half-indicator", [](std::string &d) {
		MeasurableSet X = interval_set(IntervalUnion({{Rational(1, 2), Rational(1)}}));
		Rational v = measure(X, p);
		d = "measure " + rs(v);
		return rabs(v - Rational(1, 2)) <= pow2(-long(p));
	});
}

/* exact mes(I cap Gamma_n) bracket from a deep prefix */
bool theta_oracle(const Bridge &b, std::uint64_t k, unsigned m, unsigned n, bool decided)
{
	unsigned K = n;
	while (Bridge::gamma_tail(K) > pow2(-2 * long(m)) / 64)
		++K;
	DyadicInterval I(k, m);
	Rational L = b.gamma_prefix(n, K).length_in(I.left(), I.right());
	if (decided)
		return L - Bridge::gamma_tail(K) > 0;
	return L < pow2(-2 * long(m));
}

void suite_bridge(Suite &s, std::uint64_t seed, bool corrupted)
{
	CatalogEntry step = suite_entry("ae-step", corrupted);
	Bridge b(step.function);
	s.check("delta-bound", [&](std::string &d) {
		for (unsigned n = 0; n <= 8; ++n) {
			Rational len = b.delta_union(n).length();
			Rational cheb = 1 - step.function.domain.term(n).integral() * rpow(Rational(3, 2), n);
			if (!(len >= cheb && len > 1 - rpow(Rational(3, 4), n))) {
				d = "fails at n = " + std::to_string(n);
				return false;
			}
		}
		d = "n <= 8";
		return true;
	});
	s.check("gamma-bound", [&](std::string &d) {
		for (unsigned n = 0; n <= 6; ++n)
			if (!(b.gamma_lower_bound(n, n + 6) > 1 - 4 * rpow(Rational(3, 4), n))) {
				d = "fails at n = " + std::to_string(n);
				return false;
			}
		d = "n <= 6, K = n + 6";
		return true;
	});
	s.check("theta-oracle", [&](std::string &d) {
		std::size_t cells = 0;
		for (unsigned n = 0; n <= 3; ++n)
			for (unsigned m = 0; m <= 4; ++m)
				for (std::uint64_t k = 0; k < (std::uint64_t(1) << m); ++k) {
					bool t = b.theta(k, m, n);
					if (t != b.theta(k, m, n) || !theta_oracle(b, k, m, n, t)) {
						d = "fails at (" + std::to_string(k) + "," + std::to_string(m) + ","
						    + std::to_string(n) + ")";
						return false;
					}
					++cells;
				}
		d = std::to_string(cells) + " cells";
		return true;
	});
	CatalogEntry id = suite_entry("identity", corrupted);
	Bridge bi(id.function);
	s.check("net-bracket:identity", [&](std::string &d) {
		for (unsigned m = 1; m <= 5; ++m) {
			NetFunction nf = net_function(bi, NetIndex::canonical(m, 3));
			Rational v = 0;
			for (const auto &c : nf.coeffs)
				v += c;
			v *= pow2(-long(m));
			/* lower and upper Riemann sums of x on mesh 2^-m */
			Rational lower = (1 - pow2(-long(m))) / 2, upper = (1 + pow2(-long(m))) / 2;
			if (v < lower - nf.coefficient_error || v > upper + nf.coefficient_error) {
				d = "net integral " + rs(v) + " outside [" + rs(lower) + ", " + rs(upper)
				    + "] at m = " + std::to_string(m);
				return false;
			}
		}
		d = "m = 1..5";
		return true;
	});
	s.check("mean-cauchy:identity", [&](std::string &d) {
		ProbeReport r = mean_cauchy_probe(bi, NetIndex::canonical(4, 3), 8, seed);
		d = "max L1 " + rs(r.max_l1) + " over " + std::to_string(r.trials) + " trials";
		return r.max_l1 < Rational(1, 8);
	});
	s.check("equality:ae-step", [&](std::string &d) {
		EqualityReport r = equality_region_check(b, 3, 4, 8, seed);
		d = std::to_string(r.passed) + "/" + std::to_string(r.samples) + " samples agree";
		return r.passed == r.samples;
	});
}

} // namespace

std::string Report::render(Format f) const
{
	if (f == Format::json)
		return json.dump(2) + "\n";
	std::ostringstream out;
	auto line = [&out](const std::vector<std::string> &row) {
		for (std::size_t i = 0; i < row.size(); ++i)
			out << (i ? "," : "") << csv_field(row[i]);
		out << "\n";
	};
	line(csv_header);
	for (const auto &r : csv_rows)
		line(r);
	return out.str();
}

int exit_code(ErrorKind k)
{
	switch (k) {
	case ErrorKind::input: return 2;
	case ErrorKind::certification: return 3;
	case ErrorKind::budget: return 4;
	}
	return 3;
}

Report error_report(const std::string &command, const Error &e)
{
	static const char *kinds[] = {"input", "certification", "budget"};
	Report r;
	r.ok = false;
	r.json["command"] = command;
	r.json["error"] = {{"kind", kinds[int(e.kind)]}, {"message", e.what()}};
	r.csv_header = {"error", "message"};
	r.csv_rows.push_back({kinds[int(e.kind)], e.what()});
	return r;
}

Report cmd_integrate(const std::string &function, unsigned p, const std::string &method,
                     const RunOptions &opt)
{
	Stopwatch sw;
	if (method != "lebesgue" && method != "riemann-net")
		fail_input("unknown method '" + method + "' (expected lebesgue or riemann-net)");
	CatalogEntry e = entry_or_fail(function);
	Report r;
	r.json["command"] = "integrate";
	r.json["inputs"] = {{"function", function}, {"precision", rs(std::size_t(p))},
	                    {"method", method}};
	IntegralReport ir;
	Json bridge;
	if (method == "lebesgue") {
		if (!e.summable)
			fail_certification("'" + function + "' carries no summable representation");
		ir = lebesgue_integral_report(*e.summable, p);
	} else {
		if (!e.certificate)
			fail_certification("'" + function + "' carries no Riemann certificate");
		Bridge b(e.function);
		Conversion conv = convert_to_lebesgue(b, *e.certificate);
		ir = lebesgue_integral_report(conv.g, p);
		/* g's approximant n is built from the nets F_0 .. F_{n+2} */
		std::size_t last = ir.prefix_used + 2;
		bridge = {{"nets_used", rs(last + 1)},
		          {"final_net_level", rs(std::size_t(conv.net(last).index.m))},
		          {"zeta_count", rs(b.zeta_count())}};
	}
	r.json["result"] = {{"value", rs(ir.value)}, {"error_bound", rs(pow2(-long(p)))},
	                    {"prefix_used", rs(ir.prefix_used)}, {"tail_bound", rs(ir.tail_bound)}};
	if (!bridge.is_null())
		r.json["bridge"] = bridge;
	if (e.expected)
		r.json["expected"] = {{"value", rs(*e.expected)}, {"source", e.expected_source}};
	r.csv_header = {"function", "precision", "method", "value", "error_bound", "prefix_used",
	                "tail_bound"};
	r.csv_rows.push_back({function, rs(std::size_t(p)), method, rs(ir.value),
	                      rs(pow2(-long(p))), rs(ir.prefix_used), rs(ir.tail_bound)});
	add_timing(r, opt, sw);
	return r;
}

Report cmd_net_table(const std::string &function, unsigned m_min, unsigned m_max, unsigned n,
                     const RunOptions &opt)
{
	Stopwatch sw;
	if (m_min > m_max)
		fail_input("net-table needs m-min <= m-max");
	if (m_max > 24)
		fail_input("net-table levels above 24 are not supported");
	CatalogEntry e = entry_or_fail(function);
	Bridge b(e.function);
	Report r;
	r.json["command"] = "net-table";
	r.json["inputs"] = {{"function", function}, {"m_min", rs(std::size_t(m_min))},
	                    {"m_max", rs(std::size_t(m_max))}, {"n", rs(std::size_t(n))}};
	r.csv_header = {"m", "integral", "l1_from_previous", "coefficient_error"};
	Json rows = Json::array();
	std::vector<Rational> prev;
	for (unsigned m = m_min; m <= m_max; ++m) {
		NetFunction nf = net_function(b, NetIndex::canonical(m, n));
		Rational v = 0;
		for (const auto &c : nf.coeffs)
			v += c;
		v *= pow2(-long(m));
		std::string l1 = m == m_min ? "" : rs(step_l1_distance(prev, m - 1, nf.coeffs, m));
		Json row = {{"m", rs(std::size_t(m))}, {"integral", rs(v)}};
		row["l1_from_previous"] = m == m_min ? Json(nullptr) : Json(l1);
		row["coefficient_error"] = rs(nf.coefficient_error);
		rows.push_back(row);
		r.csv_rows.push_back({rs(std::size_t(m)), rs(v), l1, rs(nf.coefficient_error)});
		prev = std::move(nf.coeffs);
	}
	r.json["rows"] = rows;
	if (e.expected)
		r.json["expected"] = {{"value", rs(*e.expected)}, {"source", e.expected_source}};
	add_timing(r, opt, sw);
	return r;
}

Report cmd_verify(const std::string &suite, std::uint64_t seed, bool corrupted,
                  const RunOptions &opt)
{
	Stopwatch sw;
	Suite s(suite);
	if (suite == "regularity")
		suite_regularity(s, seed, corrupted);
	else if (suite == "witnesses")
		suite_witnesses(s, seed, corrupted);
	else if (suite == "integrals")
		suite_integrals(s, seed, corrupted);
	else if (suite == "bridge")
		suite_bridge(s, seed, corrupted);
	else
		fail_input("unknown suite '" + suite + "' (expected regularity, witnesses, integrals or bridge)");
	Report r = s.report(seed, corrupted);
	add_timing(r, opt, sw);
	return r;
}

Report cmd_catalog()
{
	Report r;
	r.json["command"] = "catalog";
	Json list = Json::array();
	r.csv_header = {"name", "description", "expected", "certificate", "summable"};
	for (const auto &name : catalog_names()) {
		CatalogEntry e = catalog_entry(name);
		Json j = {{"name", name}, {"description", e.description}};
		j["expected"] = e.expected ? Json(rs(*e.expected)) : Json(nullptr);
		j["certificate"] = bool(e.certificate);
		j["summable"] = bool(e.summable);
		j["probe_only"] = e.probe_only;
		list.push_back(j);
		r.csv_rows.push_back({name, e.description, e.expected ? rs(*e.expected) : "",
		                      e.certificate ? "yes" : "no", e.summable ? "yes" : "no"});
	}
	r.json["entries"] = list;
	return r;
}

} // namespace cmeasure
