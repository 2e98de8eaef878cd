#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace ple {

enum class SortKind { Int, Bool, Univ, Fun };

class Sort;

struct SortNode {
  SortKind kind;
  std::shared_ptr<const SortNode> arg;  // Fun only
  std::shared_ptr<const SortNode> res;  // Fun only
};

// Immutable, cheaply copyable sort handle. Data values of every datatype
// share the single universal sort; the surface type checker keeps
// datatypes apart before embedding.
class Sort {
 public:
  Sort() : node_(nullptr) {}

  static Sort int_();
  static Sort bool_();
  static Sort univ();
  static Sort fun(Sort arg, Sort res);

  SortKind kind() const { return node_->kind; }
  bool is_int() const { return kind() == SortKind::Int; }
  bool is_bool() const { return kind() == SortKind::Bool; }
  bool is_univ() const { return kind() == SortKind::Univ; }
  bool is_fun() const { return kind() == SortKind::Fun; }
  bool valid() const { return node_ != nullptr; }

  Sort fun_arg() const { return Sort(node_->arg); }
  Sort fun_res() const { return Sort(node_->res); }

  bool operator==(const Sort& o) const;
  bool operator!=(const Sort& o) const { return !(*this == o); }

  std::string str() const;
  size_t hash() const;

 private:
  explicit Sort(std::shared_ptr<const SortNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const SortNode> node_;
};

}  // namespace ple
