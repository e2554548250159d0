#include "dickesim/expm.hpp"

#include <cmath>

namespace dicke {

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("expm: matrix must be square");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("expm: matrix has non-finite entries");
  }
  const Index n = a.rows();
  if (n == 0) return Matrix(0, 0);

  // Pade coefficients for the [13/13] diagonal approximant.
  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) {
    s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  }
  Matrix x = a;
  if (s > 0) x *= std::ldexp(1.0, -s);

  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x2 * x4;
  const Matrix id = Matrix::Identity(n, n);

  Matrix u = x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 +
                  b[5] * x4 + b[3] * x2 + b[1] * id);
  Matrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 +
             b[4] * x4 + b[2] * x2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

}  // namespace dicke
