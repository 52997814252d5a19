#include "chronexp/pushforward.hpp"

namespace chronexp::opalg {

PolySeries chronological_series_apply(const OperatorExpr& generator, const PolySeries& f,
                                      int order, const std::string& time_var) {
  PolySeries acc = f;
  PolySeries iterate = f;
  for (int m = 1; m <= order; ++m) {
    iterate = apply_operator(generator, iterate).antiderivative(time_var);
    acc = acc + iterate;
  }
  return acc;
}

bool pushforward_check(const OperatorExpr& generator, const expr::Expression& F,
                       const std::vector<PolySeries>& args, int order,
                       const std::string& time_var) {
  if (args.empty()) throw PushforwardError("pushforward_check: no arguments");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < args.size(); ++i) names.push_back("b" + std::to_string(i + 1));
  for (const auto& v : F.variables())
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw PushforwardError("pushforward_check: F references unknown argument '" + v + "'");

  auto Fb = compose_polynomial(F, names, args);
  if (!Fb) throw PushforwardError("pushforward_check: F is not polynomial");

  PolySeries lhs = chronological_series_apply(generator, *Fb, order, time_var);

  std::vector<PolySeries> pushed;
  pushed.reserve(args.size());
  for (const auto& b : args)
    pushed.push_back(chronological_series_apply(generator, b, order, time_var));
  auto rhs = compose_polynomial(F, names, pushed);
  if (!rhs) throw PushforwardError("pushforward_check: F is not polynomial");

  if (lhs.lossy() || rhs->lossy())
    throw PushforwardError("pushforward_check: degree budget exhausted");

  // the truncated series agree only through time-degree `order`
  return lhs.restrict_var_degree(time_var, order) ==
         rhs->restrict_var_degree(time_var, order);
}

}  // namespace chronexp::opalg
