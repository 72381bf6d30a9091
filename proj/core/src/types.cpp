#include "hinf/types.hpp"

namespace hinf
{
  std::vector<MultiIndex> multi_indices(int n, int total)
  {
    std::vector<MultiIndex> out;
    MultiIndex cur(n, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void
    {
      if (pos == n - 1)
      {
        cur[pos] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v)
      {
        cur[pos] = v;
        self(self, pos + 1, left - v);
      }
    };
    if (n > 0) rec(rec, 0, total);
    return out;
  }

  void SymbolClassParams::validate_for_seminorms() const
  {
    if (!(0.0 <= delta && delta <= rho && rho <= 1.0 && delta < 1.0))
      throw DomainError("symbol class requires 0 <= delta <= rho <= 1 and delta < 1");
  }

  void SymbolClassParams::validate_for_hypoellipticity() const
  {
    if (!(0.0 <= delta && delta < rho && rho <= 1.0))
      throw DomainError("hypoellipticity requires 0 <= delta < rho <= 1");
    if (m < 0.0) throw DomainError("hypoellipticity requires order m >= 0");
  }

}  // namespace hinf
