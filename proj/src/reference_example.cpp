#include "uio/reference_example.hpp"

namespace uio::reference {

namespace {

Matrix rows(Eigen::Index r, Eigen::Index c, std::initializer_list<double> values) {
  Matrix m(r, c);
  auto it = values.begin();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

}  // namespace

StateSpaceModel model() {
  return make_model(rows(3, 3, {1, 1, -1, 2, 1, 1, 1, 0, -1}), rows(3, 1, {-1, 1, 1}), rows(2, 3, {1, 1, 0, 1, -1, 1}),
                    rows(2, 1, {2, 1}), rows(3, 1, {1, 0, 1}), rows(2, 1, {1, 1}), "three-state example");
}

std::vector<std::complex<double>> poles() { return {0.0, 0.0, 0.5}; }

Matrix printed_psi() {
  return rows(5, 12, {4, 3, 2, -1, -2, 1, 0, 0, 0, 0, 0,  0,  //
                      2, 1, 1, 0,  -1, 0, 1, 0, 0, 0, 0,  0,  //
                      6, 3, 2, -1, -3, 0, 0, 0, 1, 0, 0,  0,  //
                      4, 4, 0, -1, -2, 0, 0, 0, 0, 1, 0,  0,  //
                      4, 3, 2, -1, 0,  0, 0, 1, 0, 0, -1, 1});
}

Matrix printed_a_bar() {
  return rows(3, 3, {-3.2941, -2.9412, -1.2353,  //
                     -0.8235, -0.2353, -0.0588,  //
                     -0.9412, -0.4118, 0.6471});
}

Matrix printed_c_bar() {
  return rows(2, 3, {-0.9378, 0.8800, -1.4951,  //
                     1.3943, 0.7607, 1.1882});
}

Matrix printed_gain() {
  return rows(3, 2, {1.1351, 2.8592,  //
                     0.0810, 0.4450,  //
                     0.3964, 0.5414});
}

Matrix printed_omega() {
  return rows(3, 5, {0, 2.9767, -1.1628, 0.2558, -0.0930,  //
                     0, 0.2326, -0.3721, -0.0581, 0.4302,  //
                     1, 0.4651, -0.7442, -0.1163, -0.1395});
}

UioRealization printed_uio() {
  UioRealization u;
  u.A_uio = rows(3, 3, {0.3721, -0.2326, -0.4651,  //
                        0.2791, -0.1744, -0.3488,  //
                        0.5581, -0.3488, -0.6977});
  u.B_u = rows(3, 1, {-2.9070, -0.1802, -0.3605});
  u.B_y = rows(3, 2, {1.0930, -0.1860,  //
                      0.3198, 0.1105,   //
                      0.6395, 0.2209});
  u.D_u = rows(3, 1, {0.0930, -0.4302, 0.1395});
  u.D_y = rows(3, 2, {-0.0930, 0.0930,  //
                      0.4302, -0.4302,  //
                      -0.1395, 0.1395});
  return u;
}

StateSpaceModel decoupling_counterexample() {
  return make_model(rows(2, 2, {0.5, 1, 0, 0.3}), rows(2, 1, {1, 0}), rows(1, 2, {1, 0}), rows(1, 1, {0}),
                    rows(2, 1, {0, 1}), rows(1, 1, {0}), "output-blind disturbance");
}

}  // namespace uio::reference
