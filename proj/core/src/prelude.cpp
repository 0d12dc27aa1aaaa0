#include "hobn/prelude.hpp"

namespace hobn {

namespace {

surface_ptr node(surface_term t) {
  return std::make_shared<const surface_term>(std::move(t));
}

const char* const zero_src = "!(\\z. \\s. der z)";

surface_ptr wrap_successor(const surface_ptr& prev) {
  surface_term s_var;
  s_var.kind = surface_kind::variable;
  s_var.name = "s";
  surface_term force;
  force.kind = surface_kind::der;
  force.children = {node(std::move(s_var))};
  surface_term applied;
  applied.kind = surface_kind::app;
  applied.children = {node(std::move(force)), prev};
  surface_term inner;
  inner.kind = surface_kind::abs;
  inner.binders = {"s"};
  inner.children = {node(std::move(applied))};
  surface_term outer;
  outer.kind = surface_kind::abs;
  outer.binders = {"z"};
  outer.children = {node(std::move(inner))};
  surface_term thunk;
  thunk.kind = surface_kind::bang;
  thunk.children = {node(std::move(outer))};
  return node(std::move(thunk));
}

}  // namespace

const std::map<std::string, surface_ptr>& prelude_macros() {
  static const std::map<std::string, surface_ptr> table = [] {
    std::map<std::string, surface_ptr> m;
    m["zero"] = parse_surface(zero_src);
    m["succ"] = parse_surface("\\m. !(\\z. \\s. (der s) m)");
    m["pred"] = parse_surface("\\n. (der n) !(" + std::string(zero_src) +
                              ") !(\\m. m)");
    m["ifZero"] = parse_surface("\\n. \\zt. \\st. (der n) zt st");
    m["fix"] = parse_surface(
        "\\F. (\\z. (der F) !((der z) z)) !(\\z. (der F) !((der z) z))");
    return m;
  }();
  return table;
}

surface_ptr numeral_encoding(std::uint64_t n) {
  static const surface_ptr zero = parse_surface(zero_src);
  surface_ptr out = zero;
  for (std::uint64_t i = 0; i < n; ++i) out = wrap_successor(out);
  return out;
}

}  // namespace hobn
