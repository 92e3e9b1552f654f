#pragma once

#include "repgame/stage_game.hpp"

namespace repgame::testing {

// Product choice game with stochastic cost.  Rows H, L; columns T, N;
// states theta_g (cost good) and theta_b (cost bad).
inline StageGame product_choice() {
  StageGame g;
  g.theta_labels = {"theta_g", "theta_b"};
  g.a_labels = {"H", "L"};
  g.b_labels = {"T", "N"};
  //            (theta, a, b):  gT  gN
  g.u1_table = {1, -1,   // theta_g, H
                2, 0,    // theta_g, L
                -1, -3,  // theta_b, H
                2, 0};   // theta_b, L
  g.u2_table = {2, 0,    // H
                -2, 0};  // L
  g.validate();
  return g;
}

inline Environment product_choice_env(double p_g, double eps) {
  return make_flexible_env(product_choice(), {p_g, 1.0 - p_g}, eps);
}

}  // namespace repgame::testing
