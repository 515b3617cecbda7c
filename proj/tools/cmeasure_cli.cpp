/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/commands.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace cmeasure;

int main(int argc, char **argv)
{
	CLI::App app{"Exact constructive measure and integration on [0,1]"};
	app.require_subcommand(1);

	bool csv = false, json = false, timings = false;
	auto formats = [&](CLI::App *sub) {
		auto *j = sub->add_flag("--json", json, "JSON report (default)");
		auto *c = sub->add_flag("--csv", csv, "CSV table");
		j->excludes(c);
		sub->add_flag("--timings", timings, "add wall-clock fields to the report");
	};

	std::string function, method = "lebesgue";
	unsigned precision = 10;
	auto *integrate = app.add_subcommand("integrate", "integral of a catalog function");
	integrate->add_option("--function", function, "catalog name")->required();
	integrate->add_option("--precision", precision, "error bound exponent p (2^-p)")->required();
	integrate->add_option("--method", method, "lebesgue or riemann-net");
	formats(integrate);

	unsigned m_min = 0, m_max = 0, depth = 3;
	auto *table = app.add_subcommand("net-table", "canonical net integrals by level");
	table->add_option("--function", function, "catalog name")->required();
	table->add_option("--m-min", m_min, "first level")->required();
	table->add_option("--m-max", m_max, "last level")->required();
	table->add_option("--n", depth, "sample depth n of the cell tags");
	formats(table);

	std::string suite;
	std::uint64_t seed = 0;
	bool corrupted = false;
	auto *verify = app.add_subcommand("verify", "run an invariant suite");
	verify->add_option("--suite", suite, "regularity, witnesses, integrals or bridge")->required();
	verify->add_option("--seed", seed, "seed for randomized checks");
	verify->add_flag("--corrupted-catalog", corrupted, "inject catalog faults");
	formats(verify);

	auto *catalog = app.add_subcommand("catalog", "list catalog functions");
	formats(catalog);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		int rc = app.exit(e);
		return rc == 0 ? 0 : 2;
	}

	Format fmt = csv ? Format::csv : Format::json;
	RunOptions opt;
	opt.timings = timings;
	std::string command = app.get_subcommands().front()->get_name();
	try {
		Report r;
		if (*integrate)
			r = cmd_integrate(function, precision, method, opt);
		else if (*table)
			r = cmd_net_table(function, m_min, m_max, depth, opt);
		else if (*verify)
			r = cmd_verify(suite, seed, corrupted, opt);
		else
			r = cmd_catalog();
		std::cout << r.render(fmt);
		return r.ok ? exit_ok : exit_failed_check;
	} catch (const Error &e) {
		std::cout << error_report(command, e).render(fmt);
		std::cerr << "cmeasure: " << e.what() << "\n";
		return exit_code(e.kind);
	}
}
