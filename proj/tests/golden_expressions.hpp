#pragma once

// Expression golden values, computed independently with Python's math module
// (with ^ mapped to **, which has the same precedence and associativity).

#include <cstddef>
#include <string_view>

namespace rheoflame::testing {

struct GoldenValue {
  std::string_view text;
  double t, u, v;
  double expected;
};

inline constexpr GoldenValue kGoldenValues[] = {
    {"2+2*t", 3.0, 0.0, 0.0, 8.0},
    {"(t+5)/20", 15.0, 0.0, 0.0, 1.0},
    {"((t+5)+u-v)/20", 15.0, 2.0, 2.0, 1.0},
    {"pi", 0.0, 0.0, 0.0, 3.141592653589793},
    {"2^3^2", 0.0, 0.0, 0.0, 512.0},
    {"-2^2", 0.0, 0.0, 0.0, -4.0},
    {"(-2)^2", 0.0, 0.0, 0.0, 4.0},
    {"2^-1", 0.0, 0.0, 0.0, 0.5},
    {"-t*u", 2.0, 3.0, 0.0, -6.0},
    {"t-u-v", 10.0, 3.0, 2.0, 5.0},
    {"t/u/v", 24.0, 3.0, 2.0, 4.0},
    {"1+t/5", 16.0, 0.0, 0.0, 4.2},
    {"2+t/5", 16.0, 0.0, 0.0, 5.2},
    {"1e-3*t", 5.0, 0.0, 0.0, 0.005},
    {"2.5E+2", 0.0, 0.0, 0.0, 250.0},
    {".5*u", 0.0, 4.0, 0.0, 2.0},
    {"sin(pi/2)", 0.0, 0.0, 0.0, 1.0},
    {"cos(t)", 1.25, 0.0, 0.0, 0.3153223623952687},
    {"tan(u)", 0.0, 0.3, 0.0, 0.30933624960962325},
    {"sqrt(u^2+v^2)", 0.0, 3.0, 4.0, 5.0},
    {"exp(-t)", 2.0, 0.0, 0.0, 0.1353352832366127},
    {"log(exp(2))", 0.0, 0.0, 0.0, 2.0},
    {"abs(u-v)", 0.0, 1.0, 5.0, 4.0},
    {"atan2(v,u)", 0.0, -1.0, 1.0, 2.356194490192345},
    {"min(t,u)", 3.0, -2.0, 0.0, -2.0},
    {"max(t,u)", 3.0, -2.0, 0.0, 3.0},
    {"1+2*3-4/5", 0.0, 0.0, 0.0, 6.2},
    {"(1+2)*(3-4)/5", 0.0, 0.0, 0.0, -0.6},
    {"--t", 7.0, 0.0, 0.0, 7.0},
    {"t^2*u+v", 3.0, 2.0, 1.0, 19.0},
    {"sqrt(4*u^2+v^2)", 0.0, 1.5, 0.0, 3.0},
    {"-1+sqrt(1+sqrt(4*u^2+v^2))", 0.0, 1.5, 0.0, 1.0},
    {"0.5 * (1 + cos(2*pi*t))", 0.125, 0.0, 0.0, 0.8535533905932737},
    {"  t  *  ( u + v )  ", 2.0, 3.0, 4.0, 14.0},
    {"max(min(u,v),t)^2", 1.0, 3.0, 2.0, 4.0},
};

struct GoldenError {
  std::string_view text;
  std::size_t offset;
};

inline constexpr GoldenError kGoldenErrors[] = {
    {"sin(", 4},   {"2+", 2},      {"(t", 2},     {"t)", 1},        {"2 3", 2},
    {"foo(t)", 0}, {"atan2(t)", 0}, {"1e", 2},     {"t $ u", 2},     {"", 0},
    {"x+1", 0},    {"sin t", 4},   {"max(t,u,v)", 0}, {"2*(3+)", 5},
};

}  // namespace rheoflame::testing
