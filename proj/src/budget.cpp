/* SPDX-License-Identifier: Apache-2.0 */

#include <cmeasure/budget.hpp>
#include <cmeasure/rational.hpp>

#include <cstdlib>
#include <sstream>

namespace cmeasure {

Budget Budget::parse(const std::string &spec)
{
	Budget b;
	std::stringstream ss(spec);
	std::string item;
	while (std::getline(ss, item, ',')) {
		if (item.empty())
			continue;
		auto eq = item.find('=');
		if (eq == std::string::npos)
			fail_input("budget entry without '=': " + item);
		std::string key = item.substr(0, eq);
		unsigned long val;
		try {
			val = std::stoul(item.substr(eq + 1));
		} catch (const std::exception &) {
			fail_input("budget value is not a number: " + item);
		}
		if (key == "eps") b.eps_halvings = unsigned(val);
		else if (key == "depth") b.depth = val;
		else if (key == "ladder") b.ladder = unsigned(val);
		else if (key == "terms") b.terms = val;
		else fail_input("unknown budget key: " + key);
	}
	return b;
}

const Budget &Budget::current()
{
	static const Budget b = [] {
		const char *env = std::getenv("CMEASURE_BUDGET");
		return env ? parse(env) : Budget{};
	}();
	return b;
}

} // namespace cmeasure
