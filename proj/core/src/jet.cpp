#include "hinf/jet.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace hinf
{
  namespace
  {
    void enumerate(int vars, int total, std::vector<int>& current, int pos, std::vector<int>& out)
    {
      if (pos == vars - 1)
      {
        current[pos] = total;
        out.insert(out.end(), current.begin(), current.end());
        return;
      }
      // reverse lexicographic so that x_1 powers come first
      for (int v = total; v >= 0; --v)
      {
        current[pos] = v;
        enumerate(vars, total - v, current, pos + 1, out);
      }
    }
  }  // namespace

  JetLayout::JetLayout(int vars, int order) : vars_(vars), order_(order)
  {
    if (vars < 1 || order < 0) throw DomainError("JetLayout: invalid dimensions");
    std::vector<int> current(vars);
    for (int d = 0; d <= order; ++d)
    {
      const std::size_t before = exponents_.size();
      enumerate(vars, d, current, 0, exponents_);
      const std::size_t added = (exponents_.size() - before) / vars;
      degrees_.insert(degrees_.end(), added, d);
    }
    size_ = static_cast<int>(degrees_.size());

    raise_.assign(static_cast<std::size_t>(size_) * vars_, -1);
    std::vector<int> e(vars_);
    for (int i = 0; i < size_; ++i)
    {
      for (int v = 0; v < vars_; ++v)
      {
        auto base = exponent(i);
        std::copy(base.begin(), base.end(), e.begin());
        ++e[v];
        raise_[static_cast<std::size_t>(i) * vars_ + v] = index_of(e);
      }
    }

    for (int i = 0; i < size_; ++i)
    {
      for (int j = 0; j < size_; ++j)
      {
        if (degrees_[i] + degrees_[j] > order_) continue;
        auto a = exponent(i);
        auto b = exponent(j);
        for (int v = 0; v < vars_; ++v) e[v] = a[v] + b[v];
        products_.push_back({i, j, index_of(e)});
      }
    }
    std::stable_sort(products_.begin(), products_.end(),
        [this](const Product& l, const Product& r) { return degrees_[l.target] < degrees_[r.target]; });
    product_count_.assign(order_ + 1, 0);
    for (int d = 0; d <= order_; ++d)
    {
      product_count_[d] = static_cast<int>(std::count_if(products_.begin(), products_.end(),
          [this, d](const Product& p) { return degrees_[p.target] <= d; }));
    }
  }

  int JetLayout::index_of(std::span<const int> e) const
  {
    int deg = 0;
    for (int v : e)
    {
      if (v < 0) return -1;
      deg += v;
    }
    if (deg > order_) return -1;
    // linear scan within the degree block; layouts are small
    int start = 0;
    while (start < size_ && degrees_[start] < deg) ++start;
    for (int i = start; i < size_ && degrees_[i] == deg; ++i)
    {
      if (std::equal(e.begin(), e.end(), exponent(i).begin())) return i;
    }
    return -1;
  }

  std::shared_ptr<const JetLayout> JetLayout::get(int vars, int order)
  {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{vars, order}];
    if (!slot) slot = std::make_shared<const JetLayout>(vars, order);
    return slot;
  }

  MatJet::MatJet(const JetLayout* layout, int k)
      : layout_(layout), k_(k), valid_(layout->order()), c_(static_cast<std::size_t>(layout->size()) * k * k)
  {
  }

  MatJet MatJet::constant(const JetLayout* layout, const Matrix& value)
  {
    MatJet j(layout, static_cast<int>(value.rows()));
    for (int p = 0; p < j.k_; ++p)
      for (int q = 0; q < j.k_; ++q) j.at(0, p, q) = value(p, q);
    return j;
  }

  MatJet MatJet::scalar_constant(const JetLayout* layout, Complex value)
  {
    MatJet j(layout, 1);
    j.c_[0] = value;
    return j;
  }

  MatJet MatJet::variable(const JetLayout* layout, int var, double value)
  {
    MatJet j(layout, 1);
    j.c_[0] = value;
    if (layout->order() >= 1) j.c_[1 + var] = 1.0;
    return j;
  }

  Matrix MatJet::coefficient(int idx) const
  {
    Matrix m(k_, k_);
    for (int p = 0; p < k_; ++p)
      for (int q = 0; q < k_; ++q) m(p, q) = at(idx, p, q);
    return m;
  }

  Matrix MatJet::derivative_value(std::span<const int> e) const
  {
    const int idx = layout_->index_of(e);
    int deg = 0;
    double fact = 1.0;
    for (int v : e)
    {
      deg += v;
      for (int i = 2; i <= v; ++i) fact *= i;
    }
    if (idx < 0 || deg > valid_) throw DomainError("MatJet: derivative order exceeds jet order");
    return coefficient(idx) * fact;
  }

  MatJet& MatJet::operator+=(const MatJet& other)
  {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    valid_ = std::min(valid_, other.valid_);
    return *this;
  }

  MatJet& MatJet::operator-=(const MatJet& other)
  {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
    valid_ = std::min(valid_, other.valid_);
    return *this;
  }

  MatJet& MatJet::operator*=(Complex s)
  {
    for (auto& v : c_) v *= s;
    return *this;
  }

  MatJet operator*(const MatJet& a, const MatJet& b)
  {
    const int k = a.k_;
    MatJet r(a.layout_, k);
    r.valid_ = std::min(a.valid_, b.valid_);
    const auto& prods = a.layout_->products();
    const int count = a.layout_->products_up_to(r.valid_);
    if (k == 1)
    {
      for (int t = 0; t < count; ++t)
      {
        const auto& pr = prods[t];
        r.c_[pr.target] += a.c_[pr.lhs] * b.c_[pr.rhs];
      }
      return r;
    }
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    for (int t = 0; t < count; ++t)
    {
      const auto& pr = prods[t];
      const Complex* A = a.c_.data() + pr.lhs * kk;
      const Complex* B = b.c_.data() + pr.rhs * kk;
      Complex* C = r.c_.data() + pr.target * kk;
      for (int p = 0; p < k; ++p)
        for (int l = 0; l < k; ++l)
        {
          const Complex apl = A[p * k + l];
          for (int q = 0; q < k; ++q) C[p * k + q] += apl * B[l * k + q];
        }
    }
    return r;
  }

  MatJet& MatJet::add_identity(Complex s)
  {
    for (int p = 0; p < k_; ++p) at(0, p, p) += s;
    return *this;
  }

  MatJet MatJet::inverse() const
  {
    // B_0 = A_0^{-1};  B_e = -A_0^{-1} sum_{f != 0, f + g = e} A_f B_g
    const int k = k_;
    MatJet r(layout_, k);
    r.valid_ = valid_;
    const Matrix a0 = value();
    Matrix a0inv(k, k);
    if (k == 1)
      a0inv(0, 0) = 1.0 / a0(0, 0);
    else
      a0inv = Eigen::PartialPivLU<Matrix>(a0).inverse();
    if (!a0inv.allFinite())
      throw NumericalError("MatJet::inverse: singular constant term");
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) r.at(0, p, q) = a0inv(p, q);

    const auto& prods = layout_->products();
    const int count = layout_->products_up_to(valid_);
    // products are sorted by target degree; accumulate per target, finishing a degree
    // block before starting the next one.
    std::vector<Complex> acc(c_.size());
    for (int deg = 1; deg <= valid_; ++deg)
    {
      const int end = layout_->products_up_to(deg);
      for (int t = layout_->products_up_to(deg - 1); t < end && t < count; ++t)
      {
        const auto& pr = prods[t];
        if (pr.lhs == 0) continue;  // f != 0
        const std::size_t kk = static_cast<std::size_t>(k) * k;
        const Complex* A = c_.data() + pr.lhs * kk;
        const Complex* B = r.c_.data() + pr.rhs * kk;
        Complex* C = acc.data() + pr.target * kk;
        for (int p = 0; p < k; ++p)
          for (int l = 0; l < k; ++l)
            for (int q = 0; q < k; ++q) C[p * k + q] += A[p * k + l] * B[l * k + q];
      }
      for (int idx = 0; idx < layout_->size(); ++idx)
      {
        if (layout_->degree(idx) != deg) continue;
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q)
          {
            Complex s = 0.0;
            for (int l = 0; l < k; ++l) s += a0inv(p, l) * acc[(static_cast<std::size_t>(idx) * k + l) * k + q];
            r.at(idx, p, q) = -s;
          }
      }
    }
    return r;
  }

  MatJet MatJet::derivative(int var) const
  {
    if (valid_ == 0) throw DomainError("MatJet::derivative: jet order exhausted");
    MatJet r(layout_, k_);
    r.valid_ = valid_ - 1;
    const std::size_t kk = static_cast<std::size_t>(k_) * k_;
    for (int idx = 0; idx < layout_->size(); ++idx)
    {
      if (layout_->degree(idx) > r.valid_) continue;
      const int up = layout_->raise(idx, var);
      if (up < 0) continue;
      const double factor = layout_->exponent(up)[var];
      for (std::size_t s = 0; s < kk; ++s) r.c_[idx * kk + s] = factor * c_[up * kk + s];
    }
    return r;
  }

  MatJet MatJet::compose(std::span<const Complex> coeffs) const
  {
    if (k_ != 1) throw DomainError("MatJet::compose: scalar jets only");
    MatJet h = *this;
    h.c_[0] = 0.0;
    const int top = std::min<int>(static_cast<int>(coeffs.size()) - 1, valid_);
    MatJet r = scalar_constant(layout_, coeffs[top]);
    r.valid_ = valid_;
    for (int kdeg = top - 1; kdeg >= 0; --kdeg)
    {
      r = r * h;
      r.c_[0] += coeffs[kdeg];
    }
    return r;
  }

  MatJet MatJet::entry(int p, int q) const
  {
    MatJet r(layout_, 1);
    r.valid_ = valid_;
    for (int idx = 0; idx < layout_->size(); ++idx) r.c_[idx] = at(idx, p, q);
    return r;
  }

  MatJet MatJet::from_entries(int k, std::span<const MatJet> entries)
  {
    MatJet r(entries[0].layout_, k);
    r.valid_ = entries[0].valid_;
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
      {
        const MatJet& e = entries[p * k + q];
        r.valid_ = std::min(r.valid_, e.valid_);
        for (int idx = 0; idx < r.layout_->size(); ++idx) r.at(idx, p, q) = e.c_[idx];
      }
    return r;
  }

  // ---------------------------------------------------------------------------

  BatchJet::BatchJet(const JetLayout* layout, int k, int batch)
      : layout_(layout), k_(k), batch_(batch), valid_(layout->order()),
        c_(static_cast<std::size_t>(layout->size()) * k * k, Eigen::ArrayXcd::Zero(batch))
  {
  }

  BatchJet BatchJet::gather(std::span<const MatJet* const> jets)
  {
    if (jets.empty()) throw DomainError("BatchJet::gather: empty batch");
    const MatJet& first = *jets[0];
    BatchJet r(first.layout(), first.k(), static_cast<int>(jets.size()));
    r.valid_ = first.valid_order();
    const int size = first.layout()->size();
    for (std::size_t b = 0; b < jets.size(); ++b)
    {
      const MatJet& j = *jets[b];
      if (j.layout() != first.layout() || j.k() != first.k()) throw DomainError("BatchJet::gather: mixed jets");
      r.valid_ = std::min(r.valid_, j.valid_order());
      for (int idx = 0; idx < size; ++idx)
        for (int p = 0; p < r.k_; ++p)
          for (int q = 0; q < r.k_; ++q) r.at(idx, p, q)(b) = j.at(idx, p, q);
    }
    return r;
  }

  BatchJet& BatchJet::operator+=(const BatchJet& other)
  {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    valid_ = std::min(valid_, other.valid_);
    return *this;
  }

  BatchJet& BatchJet::operator*=(Complex s)
  {
    for (auto& v : c_) v *= s;
    return *this;
  }

  BatchJet operator*(const BatchJet& a, const BatchJet& b)
  {
    const int k = a.k_;
    BatchJet r(a.layout_, k, a.batch_);
    r.valid_ = std::min(a.valid_, b.valid_);
    const auto& prods = a.layout_->products();
    const int count = a.layout_->products_up_to(r.valid_);
    for (int t = 0; t < count; ++t)
    {
      const auto& pr = prods[t];
      for (int p = 0; p < k; ++p)
        for (int l = 0; l < k; ++l)
          for (int q = 0; q < k; ++q) r.at(pr.target, p, q) += a.at(pr.lhs, p, l) * b.at(pr.rhs, l, q);
    }
    return r;
  }

  BatchJet& BatchJet::add_identity(Complex s)
  {
    for (int p = 0; p < k_; ++p) at(0, p, p) += s;
    return *this;
  }

  BatchJet BatchJet::inverse() const
  {
    const int k = k_;
    BatchJet r(layout_, k, batch_);
    r.valid_ = valid_;
    // constant term, member by member for k > 1
    if (k == 1)
      r.at(0, 0, 0) = at(0, 0, 0).inverse();
    else
    {
      Matrix a0(k, k);
      for (int b = 0; b < batch_; ++b)
      {
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q) a0(p, q) = at(0, p, q)(b);
        const Matrix inv = Eigen::PartialPivLU<Matrix>(a0).inverse();
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q) r.at(0, p, q)(b) = inv(p, q);
      }
    }
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
        if (!r.at(0, p, q).isFinite().all()) throw NumericalError("BatchJet::inverse: singular constant term");

    const auto& prods = layout_->products();
    std::vector<Eigen::ArrayXcd> acc(c_.size(), Eigen::ArrayXcd::Zero(batch_));
    auto acc_at = [&](int idx, int p, int q) -> Eigen::ArrayXcd& { return acc[(static_cast<std::size_t>(idx) * k + p) * k + q]; };
    for (int deg = 1; deg <= valid_; ++deg)
    {
      for (int t = layout_->products_up_to(deg - 1); t < layout_->products_up_to(deg); ++t)
      {
        const auto& pr = prods[t];
        if (pr.lhs == 0) continue;
        for (int p = 0; p < k; ++p)
          for (int l = 0; l < k; ++l)
            for (int q = 0; q < k; ++q) acc_at(pr.target, p, q) += at(pr.lhs, p, l) * r.at(pr.rhs, l, q);
      }
      for (int idx = 0; idx < layout_->size(); ++idx)
      {
        if (layout_->degree(idx) != deg) continue;
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q)
          {
            Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(batch_);
            for (int l = 0; l < k; ++l) s += r.at(0, p, l) * acc_at(idx, l, q);
            r.at(idx, p, q) = -s;
          }
      }
    }
    return r;
  }

  BatchJet BatchJet::derivative(int var) const
  {
    if (valid_ == 0) throw DomainError("BatchJet::derivative: jet order exhausted");
    BatchJet r(layout_, k_, batch_);
    r.valid_ = valid_ - 1;
    for (int idx = 0; idx < layout_->size(); ++idx)
    {
      if (layout_->degree(idx) > r.valid_) continue;
      const int up = layout_->raise(idx, var);
      if (up < 0) continue;
      const double factor = layout_->exponent(up)[var];
      for (int p = 0; p < k_; ++p)
        for (int q = 0; q < k_; ++q) r.at(idx, p, q) = factor * at(up, p, q);
    }
    return r;
  }

}  // namespace hinf

