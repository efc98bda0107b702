#ifndef CFGRAPH_FACTOR_HPP
#define CFGRAPH_FACTOR_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfgraph {

using cplx = std::complex<double>;

/// A variable ranging over the cyclic group Z_N: values 0..N-1, addition mod N.
struct Variable {
  int id = 0;
  std::string name;
  int size = 1;  // N >= 1
};

/// Map from variable id to a value in 0..N-1.
using Assignment = std::map<int, int>;

/// Dense complex-valued function over an ordered scope of cyclic-group
/// variables. Storage is row-major with the first scope variable slowest.
/// A zero-scope factor is a single scalar.
class Factor {
 public:
  Factor() : values_(1, cplx(1.0, 0.0)) {}

  Factor(std::vector<Variable> scope, std::vector<cplx> values)
      : scope_(std::move(scope)), values_(std::move(values)) {
    std::size_t want = 1;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      if (scope_[i].size < 1) throw std::invalid_argument("variable domain must have size >= 1");
      for (std::size_t j = i + 1; j < scope_.size(); ++j)
        if (scope_[i].id == scope_[j].id)
          throw std::invalid_argument("duplicate variable id in factor scope");
      want *= static_cast<std::size_t>(scope_[i].size);
    }
    if (values_.size() != want)
      throw std::invalid_argument("factor value count does not match scope domain sizes");
  }

  static Factor scalar(cplx v) {
    Factor f;
    f.values_[0] = v;
    return f;
  }

  const std::vector<Variable>& scope() const { return scope_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rank() const { return scope_.size(); }
  bool is_scalar() const { return scope_.empty(); }

  /// Position of a variable id in the scope, or -1.
  int position_of(int id) const {
    for (std::size_t i = 0; i < scope_.size(); ++i)
      if (scope_[i].id == id) return static_cast<int>(i);
    return -1;
  }

  bool in_scope(int id) const { return position_of(id) >= 0; }

  /// Row-major strides, first scope variable slowest.
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(scope_.size(), 1);
    for (int i = static_cast<int>(scope_.size()) - 2; i >= 0; --i)
      s[i] = s[i + 1] * static_cast<std::size_t>(scope_[i + 1].size);
    return s;
  }

 private:
  std::vector<Variable> scope_;
  std::vector<cplx> values_;
};

}  // namespace cfgraph

#endif
