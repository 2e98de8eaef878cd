#include "ple/sorts.hpp"

#include <functional>

namespace ple {

namespace {
std::shared_ptr<const SortNode> leaf(SortKind k) {
  auto n = std::make_shared<SortNode>();
  n->kind = k;
  return n;
}
const std::shared_ptr<const SortNode>& int_node() {
  static auto n = leaf(SortKind::Int);
  return n;
}
const std::shared_ptr<const SortNode>& bool_node() {
  static auto n = leaf(SortKind::Bool);
  return n;
}
const std::shared_ptr<const SortNode>& univ_node() {
  static auto n = leaf(SortKind::Univ);
  return n;
}
}  // namespace

Sort Sort::int_() { return Sort(int_node()); }
Sort Sort::bool_() { return Sort(bool_node()); }
Sort Sort::univ() { return Sort(univ_node()); }

Sort Sort::fun(Sort arg, Sort res) {
  auto n = std::make_shared<SortNode>();
  n->kind = SortKind::Fun;
  n->arg = arg.node_;
  n->res = res.node_;
  return Sort(std::move(n));
}

bool Sort::operator==(const Sort& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->kind != o.node_->kind) return false;
  if (node_->kind != SortKind::Fun) return true;
  return Sort(node_->arg) == Sort(o.node_->arg) &&
         Sort(node_->res) == Sort(o.node_->res);
}

std::string Sort::str() const {
  switch (kind()) {
    case SortKind::Int: return "Int";
    case SortKind::Bool: return "Bool";
    case SortKind::Univ: return "Univ";
    case SortKind::Fun:
      return "(" + fun_arg().str() + "->" + fun_res().str() + ")";
  }
  return "?";
}

size_t Sort::hash() const {
  switch (kind()) {
    case SortKind::Int: return 0x9e3779b1;
    case SortKind::Bool: return 0x85ebca77;
    case SortKind::Univ: return 0xc2b2ae3d;
    case SortKind::Fun: {
      size_t h = 0x27d4eb2f;
      h = h * 1000003 + fun_arg().hash();
      h = h * 1000003 + fun_res().hash();
      return h;
    }
  }
  return 0;
}

}  // namespace ple
