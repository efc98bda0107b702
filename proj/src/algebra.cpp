#include "cfgraph/algebra.hpp"

#include <algorithm>
#include <cmath>

#include "cfgraph/fft.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfgraph {

namespace {

constexpr std::ptrdiff_t kParallelCutoff = 1 << 14;

struct SharedAxis {
  int n = 1;
  std::size_t fstride = 0;
  std::size_t gstride = 0;
  int out_axis = -1;   // -1 when the coordinate is fixed
  int fixed_value = 0; // used when out_axis < 0
};

// Layout shared by the binary operations: the union scope (f's order, then
// g's new variables), per-axis strides into both operands, and the list of
// shared variables with their stride pairs.
struct BinaryLayout {
  std::vector<Variable> out_scope;
  std::vector<std::size_t> out_strides;
  std::size_t out_size = 1;
  // per out axis: stride into f / g, zero when the operand lacks the variable
  std::vector<std::size_t> fstep, gstep;
  std::vector<SharedAxis> shared;
};

BinaryLayout make_layout(const Factor& f, const Factor& g, int fixed_id, int fixed_value) {
  BinaryLayout L;
  const auto fstr = f.strides();
  const auto gstr = g.strides();

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

  for (const auto& v : uni) {
    int fp = f.position_of(v.id);
    int gp = g.position_of(v.id);
    bool fixed = (v.id == fixed_id);
    if (fixed && (fp < 0 || gp < 0))
      throw std::invalid_argument("fixed variable must be shared by both factors");
    int out_axis = -1;
    if (!fixed) {
      out_axis = static_cast<int>(L.out_scope.size());
      L.out_scope.push_back(v);
      L.fstep.push_back(fp >= 0 ? fstr[fp] : 0);
      L.gstep.push_back(gp >= 0 ? gstr[gp] : 0);
    }
    if (fp >= 0 && gp >= 0) {
      SharedAxis s;
      s.n = v.size;
      s.fstride = fstr[fp];
      s.gstride = gstr[gp];
      s.out_axis = out_axis;
      s.fixed_value = fixed_value;
      L.shared.push_back(s);
    }
  }

  L.out_strides.assign(L.out_scope.size(), 1);
  for (int i = static_cast<int>(L.out_scope.size()) - 2; i >= 0; --i)
    L.out_strides[i] =
        L.out_strides[i + 1] * static_cast<std::size_t>(L.out_scope[i + 1].size);
  for (const auto& v : L.out_scope) L.out_size *= static_cast<std::size_t>(v.size);
  return L;
}

// Generalized convolution with an optional fixed coordinate on one shared
// variable (fixed_id < 0 means none): the workhorse behind convolve and
// convolve_at.
Factor conv_impl(const Factor& f, const Factor& g, int fixed_id, int fixed_value) {
  BinaryLayout L = make_layout(f, g, fixed_id, fixed_value);
  const cplx* fv = f.values().data();
  const cplx* gv = g.values().data();
  std::vector<cplx> out(L.out_size);
  const std::size_t rank = L.out_scope.size();
  const std::size_t nshared = L.shared.size();
  if (nshared > 32) throw std::invalid_argument("convolve: more than 32 shared variables");

  // Per out axis, the f/g contribution of non-shared coordinates; shared
  // coordinates are handled inside the inner sum.
  std::vector<std::size_t> fbase_step(rank), gbase_step(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    bool shared = false;
    for (const auto& s : L.shared)
      if (s.out_axis == static_cast<int>(a)) shared = true;
    fbase_step[a] = shared ? 0 : L.fstep[a];
    gbase_step[a] = shared ? 0 : L.gstep[a];
  }

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(L.out_size);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    std::size_t rem = static_cast<std::size_t>(t);
    std::size_t fbase = 0, gbase = 0;
    // coordinates of the shared variables for this output element
    int cshared[32];
    for (std::size_t si = 0; si < nshared; ++si)
      cshared[si] = L.shared[si].fixed_value;
    for (std::size_t a = 0; a < rank; ++a) {
      std::size_t c = rem / L.out_strides[a];
      rem %= L.out_strides[a];
      fbase += c * fbase_step[a];
      gbase += c * gbase_step[a];
      for (std::size_t si = 0; si < nshared; ++si)
        if (L.shared[si].out_axis == static_cast<int>(a)) cshared[si] = static_cast<int>(c);
    }
    // odometer over the shared tuple y_T; d[si] = (c - y) mod N indexes f
    int y[32];
    int d[32];
    std::size_t foff = fbase, goff = gbase;
    for (std::size_t si = 0; si < nshared; ++si) {
      y[si] = 0;
      d[si] = cshared[si];
      foff += static_cast<std::size_t>(d[si]) * L.shared[si].fstride;
    }
    cplx acc(0.0, 0.0);
    if (nshared == 0) {
      acc = fv[foff] * gv[goff];
    } else {
      for (;;) {
        acc += fv[foff] * gv[goff];
        std::size_t si = nshared - 1;
        for (;;) {
          const SharedAxis& s = L.shared[si];
          ++y[si];
          goff += s.gstride;
          if (d[si] == 0) {
            d[si] = s.n - 1;
            foff += static_cast<std::size_t>(s.n - 1) * s.fstride;
          } else {
            --d[si];
            foff -= s.fstride;
          }
          if (y[si] < s.n) break;
          y[si] = 0;
          goff -= static_cast<std::size_t>(s.n) * s.gstride;
          // after n steps d and foff are back at their starting values
          if (si == 0) goto done;
          --si;
        }
      }
    done:;
    }
    out[static_cast<std::size_t>(t)] = acc;
  }
  return Factor(L.out_scope, std::move(out));
}

}  // namespace

Factor multiply(const Factor& f, const Factor& g) {
  BinaryLayout L = make_layout(f, g, -1, 0);
  const cplx* fv = f.values().data();
  const cplx* gv = g.values().data();
  std::vector<cplx> out(L.out_size);
  const std::size_t rank = L.out_scope.size();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(L.out_size);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    std::size_t rem = static_cast<std::size_t>(t), foff = 0, goff = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      std::size_t c = rem / L.out_strides[a];
      rem %= L.out_strides[a];
      foff += c * L.fstep[a];
      goff += c * L.gstep[a];
    }
    out[static_cast<std::size_t>(t)] = fv[foff] * gv[goff];
  }
  return Factor(L.out_scope, std::move(out));
}

Factor convolve(const Factor& f, const Factor& g) { return conv_impl(f, g, -1, 0); }

Factor convolve_at(const Factor& f, const Factor& g, int id, int value) {
  return conv_impl(f, g, id, value);
}

Factor contract(const Factor& f, const Factor& g, int id) {
  int fp = f.position_of(id), gp = g.position_of(id);
  if (fp < 0 || gp < 0)
    throw std::invalid_argument("contract: variable must be shared by both factors");
  const int nk = f.scope()[fp].size;
  const std::size_t fk = f.strides()[fp];
  const std::size_t gk = g.strides()[gp];

  // Layout over the union minus the contracted variable; remaining shared
  // variables are matched pointwise.
  BinaryLayout L = make_layout(f, g, -1, 0);
  int drop_axis = -1;
  for (std::size_t a = 0; a < L.out_scope.size(); ++a)
    if (L.out_scope[a].id == id) drop_axis = static_cast<int>(a);

  std::vector<Variable> oscope;
  std::vector<std::size_t> fstep, gstep;
  for (std::size_t a = 0; a < L.out_scope.size(); ++a) {
    if (static_cast<int>(a) == drop_axis) continue;
    oscope.push_back(L.out_scope[a]);
    fstep.push_back(L.fstep[a]);
    gstep.push_back(L.gstep[a]);
  }
  std::size_t osize = 1;
  for (const auto& v : oscope) osize *= static_cast<std::size_t>(v.size);
  std::vector<std::size_t> ostr(oscope.size(), 1);
  for (int i = static_cast<int>(oscope.size()) - 2; i >= 0; --i)
    ostr[i] = ostr[i + 1] * static_cast<std::size_t>(oscope[i + 1].size);

  const cplx* fv = f.values().data();
  const cplx* gv = g.values().data();
  std::vector<cplx> out(osize);
  const std::size_t rank = oscope.size();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(osize);
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    std::size_t rem = static_cast<std::size_t>(t), foff = 0, goff = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      std::size_t c = rem / ostr[a];
      rem %= ostr[a];
      foff += c * fstep[a];
      goff += c * gstep[a];
    }
    cplx acc(0.0, 0.0);
    for (int k = 0; k < nk; ++k)
      acc += fv[foff + static_cast<std::size_t>(k) * fk] *
             gv[goff + static_cast<std::size_t>(k) * gk];
    out[static_cast<std::size_t>(t)] = acc;
  }
  return Factor(oscope, std::move(out));
}

Factor product_all(const std::vector<Factor>& factors, Semantics semantics) {
  Factor acc = Factor::scalar(cplx(1.0, 0.0));
  for (const auto& f : factors)
    acc = (semantics == Semantics::Convolutional) ? convolve(acc, f) : multiply(acc, f);
  return acc;
}

Factor marginalize(const Factor& f, const std::set<int>& ids) {
  for (int id : ids)
    if (!f.in_scope(id))
      throw std::invalid_argument("marginalize: unknown variable id " + std::to_string(id));
  if (ids.empty()) return f;

  std::vector<Variable> oscope;
  for (const auto& v : f.scope())
    if (!ids.count(v.id)) oscope.push_back(v);
  std::size_t osize = 1;
  for (const auto& v : oscope) osize *= static_cast<std::size_t>(v.size);
  std::vector<std::size_t> ostr(oscope.size(), 1);
  for (int i = static_cast<int>(oscope.size()) - 2; i >= 0; --i)
    ostr[i] = ostr[i + 1] * static_cast<std::size_t>(oscope[i + 1].size);

  // stride of each input axis in the output (0 when summed out)
  const std::size_t rank = f.rank();
  const auto istr = f.strides();
  std::vector<std::size_t> out_step(rank, 0);
  for (std::size_t a = 0, oa = 0; a < rank; ++a) {
    if (ids.count(f.scope()[a].id)) continue;
    out_step[a] = ostr[oa++];
  }

  std::vector<cplx> out(osize, cplx(0.0, 0.0));
  const cplx* fv = f.values().data();
  for (std::size_t t = 0; t < f.size(); ++t) {
    std::size_t rem = t, ooff = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      std::size_t c = rem / istr[a];
      rem %= istr[a];
      ooff += c * out_step[a];
    }
    out[ooff] += fv[t];
  }
  return Factor(oscope, std::move(out));
}

Factor evaluate(const Factor& f, const Assignment& evidence) {
  for (const auto& [id, val] : evidence) {
    int p = f.position_of(id);
    if (p < 0)
      throw std::invalid_argument("evaluate: unknown variable id " + std::to_string(id));
    if (val < 0 || val >= f.scope()[p].size)
      throw std::invalid_argument("evaluate: value out of domain for variable id " +
                                  std::to_string(id));
  }
  if (evidence.empty()) return f;

  std::vector<Variable> oscope;
  const auto istr = f.strides();
  std::size_t fixed_off = 0;
  std::vector<std::size_t> kept_stride;
  for (std::size_t a = 0; a < f.rank(); ++a) {
    auto it = evidence.find(f.scope()[a].id);
    if (it != evidence.end()) {
      fixed_off += static_cast<std::size_t>(it->second) * istr[a];
    } else {
      oscope.push_back(f.scope()[a]);
      kept_stride.push_back(istr[a]);
    }
  }
  std::size_t osize = 1;
  for (const auto& v : oscope) osize *= static_cast<std::size_t>(v.size);
  std::vector<std::size_t> ostr(oscope.size(), 1);
  for (int i = static_cast<int>(oscope.size()) - 2; i >= 0; --i)
    ostr[i] = ostr[i + 1] * static_cast<std::size_t>(oscope[i + 1].size);

  std::vector<cplx> out(osize);
  const cplx* fv = f.values().data();
  for (std::size_t t = 0; t < osize; ++t) {
    std::size_t rem = t, ioff = fixed_off;
    for (std::size_t a = 0; a < oscope.size(); ++a) {
      std::size_t c = rem / ostr[a];
      rem %= ostr[a];
      ioff += c * kept_stride[a];
    }
    out[t] = fv[ioff];
  }
  return Factor(oscope, std::move(out));
}

Factor dft(const Factor& f, Direction direction) {
  Factor out = f;
  const auto& scope = out.scope();
  for (std::size_t axis = 0; axis < scope.size(); ++axis) {
    const std::size_t n = static_cast<std::size_t>(scope[axis].size);
    if (n == 1) continue;
    std::size_t inner = 1;
    for (std::size_t a = axis + 1; a < scope.size(); ++a)
      inner *= static_cast<std::size_t>(scope[a].size);
    const std::size_t lines = out.size() / n;
    FftPlan plan(n);
    cplx* data = out.values().data();
    const std::ptrdiff_t nl = static_cast<std::ptrdiff_t>(lines);
#pragma omp parallel if (nl * static_cast<std::ptrdiff_t>(n) >= kParallelCutoff)
    {
      std::vector<cplx> line(n), scratch(plan.scratch_size());
#pragma omp for schedule(static)
      for (std::ptrdiff_t l = 0; l < nl; ++l) {
        const std::size_t o = static_cast<std::size_t>(l) / inner;
        const std::size_t i = static_cast<std::size_t>(l) % inner;
        const std::size_t base = o * n * inner + i;
        for (std::size_t j = 0; j < n; ++j) line[j] = data[base + j * inner];
        if (direction == Direction::Forward)
          plan.forward(line.data(), scratch.data());
        else
          plan.inverse(line.data(), scratch.data());
        for (std::size_t j = 0; j < n; ++j) data[base + j * inner] = line[j];
      }
    }
  }
  return out;
}

Factor normalize(const Factor& f) {
  cplx total(0.0, 0.0);
  for (const auto& v : f.values()) total += v;
  const double scale = std::max(1.0, std::abs(total.real()));
  if (std::abs(total.imag()) > 1e-12 * scale)
    throw std::invalid_argument("normalize: total is not real");
  if (!(total.real() > 0.0))
    throw std::invalid_argument("normalize: total is zero or negative");
  Factor out = f;
  for (auto& v : out.values()) v /= total.real();
  return out;
}

Factor reorder_scope(const Factor& f, const std::vector<int>& id_order) {
  if (id_order.size() != f.rank())
    throw std::invalid_argument("reorder_scope: order must cover the scope");
  std::vector<Variable> oscope;
  std::vector<std::size_t> in_stride;
  const auto istr = f.strides();
  for (int id : id_order) {
    int p = f.position_of(id);
    if (p < 0)
      throw std::invalid_argument("reorder_scope: id not in scope: " + std::to_string(id));
    oscope.push_back(f.scope()[static_cast<std::size_t>(p)]);
    in_stride.push_back(istr[static_cast<std::size_t>(p)]);
  }
  std::vector<std::size_t> ostr(oscope.size(), 1);
  for (int i = static_cast<int>(oscope.size()) - 2; i >= 0; --i)
    ostr[i] = ostr[i + 1] * static_cast<std::size_t>(oscope[i + 1].size);

  std::vector<cplx> out(f.size());
  const cplx* fv = f.values().data();
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::size_t rem = t, ioff = 0;
    for (std::size_t a = 0; a < oscope.size(); ++a) {
      std::size_t c = rem / ostr[a];
      rem %= ostr[a];
      ioff += c * in_stride[a];
    }
    out[t] = fv[ioff];
  }
  return Factor(oscope, std::move(out));
}

}  // namespace cfgraph
