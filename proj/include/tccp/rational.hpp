#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tccp {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Decimal or fraction text: "5", "-3", "1/2".
inline std::string to_string(const Rational& q) { return q.str(); }

}  // namespace tccp
