#include "tsroa/box.hpp"

#include <sstream>

#include "tsroa/errors.hpp"

namespace tsroa {

void Box::validate() const {
  if (lower.size() != upper.size()) {
    throw InvalidBox("box bound vectors have different lengths");
  }
  if (lower.empty()) throw InvalidBox("box has no coordinates");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < 0.0 && 0.0 < upper[i])) {
      std::ostringstream os;
      os << "box coordinate " << i << " is [" << lower[i] << ", " << upper[i]
         << "]; the origin must be strictly interior";
      throw InvalidBox(os.str());
    }
  }
}

Box Box::symmetric(const std::vector<double>& half_widths) {
  Box box;
  for (double h : half_widths) {
    box.lower.push_back(-h);
    box.upper.push_back(h);
  }
  return box;
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    const double slack = tol * (upper[i] - lower[i]);
    if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
  }
  return true;
}

}  // namespace tsroa
