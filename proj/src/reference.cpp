#include "cfgraph/reference.hpp"

#include <cmath>
#include <numbers>

namespace cfgraph::ref {

namespace {

std::vector<Variable> union_scope(const Factor& f, const Factor& g) {
  std::vector<Variable> uni = f.scope();
  for (const auto& v : g.scope()) {
    int p = f.position_of(v.id);
    if (p >= 0) {
      if (f.scope()[p].size != v.size)
        throw std::invalid_argument("domain-size mismatch on shared variable '" + v.name + "'");
    } else {
      uni.push_back(v);
    }
  }
  return uni;
}

cplx value_at(const Factor& f, const Assignment& a) {
  std::size_t off = 0;
  const auto str = f.strides();
  for (std::size_t i = 0; i < f.rank(); ++i)
    off += static_cast<std::size_t>(a.at(f.scope()[i].id)) * str[i];
  return f.values()[off];
}

// Enumerate all assignments of `vars`, invoking fn on each.
template <typename Fn>
void for_each_assignment(const std::vector<Variable>& vars, Assignment& a, std::size_t i,
                         Fn&& fn) {
  if (i == vars.size()) {
    fn();
    return;
  }
  for (int v = 0; v < vars[i].size; ++v) {
    a[vars[i].id] = v;
    for_each_assignment(vars, a, i + 1, fn);
  }
}

}  // namespace

Factor multiply(const Factor& f, const Factor& g) {
  auto uni = union_scope(f, g);
  std::vector<cplx> out;
  Assignment a;
  for_each_assignment(uni, a, 0,
                      [&] { out.push_back(value_at(f, a) * value_at(g, a)); });
  return Factor(uni, std::move(out));
}

Factor convolve(const Factor& f, const Factor& g) {
  auto uni = union_scope(f, g);
  std::vector<Variable> shared;
  for (const auto& v : f.scope())
    if (g.in_scope(v.id)) shared.push_back(v);

  std::vector<cplx> out;
  Assignment x;
  for_each_assignment(uni, x, 0, [&] {
    cplx acc(0.0, 0.0);
    Assignment y;
    for_each_assignment(shared, y, 0, [&] {
      Assignment fa = x, ga = x;
      for (const auto& s : shared) {
        int d = x.at(s.id) - y.at(s.id);
        fa[s.id] = ((d % s.size) + s.size) % s.size;
        ga[s.id] = y.at(s.id);
      }
      acc += value_at(f, fa) * value_at(g, ga);
    });
    out.push_back(acc);
  });
  return Factor(uni, std::move(out));
}

Factor dft(const Factor& f, Direction direction) {
  Factor out = f;
  const double sign = (direction == Direction::Forward) ? -1.0 : 1.0;
  for (std::size_t axis = 0; axis < out.rank(); ++axis) {
    const std::size_t n = static_cast<std::size_t>(out.scope()[axis].size);
    std::size_t inner = 1;
    for (std::size_t a = axis + 1; a < out.rank(); ++a)
      inner *= static_cast<std::size_t>(out.scope()[a].size);
    const std::size_t lines = out.size() / n;
    std::vector<cplx> line(n);
    for (std::size_t l = 0; l < lines; ++l) {
      const std::size_t base = (l / inner) * n * inner + (l % inner);
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t xx = 0; xx < n; ++xx) {
          double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k * xx) /
                       static_cast<double>(n);
          acc += out.values()[base + xx * inner] * cplx(std::cos(ang), std::sin(ang));
        }
        line[k] = (direction == Direction::Inverse) ? acc / static_cast<double>(n) : acc;
      }
      for (std::size_t k = 0; k < n; ++k) out.values()[base + k * inner] = line[k];
    }
  }
  return out;
}

}  // namespace cfgraph::ref
