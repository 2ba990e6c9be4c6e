#include "qmsim/constants.hpp"

namespace qmsim {

const PhysicalConstants& codata2018() {
  static const PhysicalConstants c{
      1.054571817e-34,   // hbar
      1.602176634e-19,   // e
      8.8541878128e-12,  // epsilon0
      9.2740100783e-24,  // mu_B
      5.0507837461e-27,  // mu_N
      9.1093837015e-31,  // m_e
      1.67262192369e-27, // m_p
      1.66053906660e-27, // u
      "CODATA 2018",
  };
  return c;
}

}  // namespace qmsim
