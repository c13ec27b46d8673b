#pragma once

#include <map>
#include <stdexcept>

namespace holobar {

/* Dimensions of a finite-total-dimension graded vector space, keyed by
 * internal degree.  Zero entries are not stored. */
struct GradedFibre {
  std::map<int, int> dims;

  int dim(int degree) const {
    auto it = dims.find(degree);
    return it == dims.end() ? 0 : it->second;
  }
  int total() const {
    int t = 0;
    for (auto& [k, d] : dims) t += d;
    return t;
  }
  int min_degree() const { return dims.empty() ? 0 : dims.begin()->first; }
  int max_degree() const { return dims.empty() ? 0 : dims.rbegin()->first; }

  /* Offset of a degree block inside the total-ordered basis (by degree, then
   * index).  Used by both the exact End(V) model and the float block side. */
  int offset(int degree) const {
    int off = 0;
    for (auto& [k, d] : dims) {
      if (k == degree) return off;
      off += d;
    }
    throw std::out_of_range("GradedFibre::offset: degree not present");
  }
};

}  // namespace holobar
