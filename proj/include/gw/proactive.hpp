#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include <Eigen/Dense>

#include "gw/types.hpp"

namespace gw {

// Attribute-based zero-shot classification toy: a nearest-prototype linear
// model over d features with one row per class. The effective prototype
// matrix is W + W_star; W is trained by gradient descent, W_star is written
// by the proactive rule. Classes are side counts; row index = class - min.
struct ToyTask {
  int d = 2;
  int class_min = 3;
  int class_max = 9;        // rows cover [class_min, class_max]
  int unseen = 9;           // never appears in train or validation
  Eigen::MatrixXd X_train;  // one sample per row
  Eigen::VectorXi y_train;
  Eigen::MatrixXd X_val;
  Eigen::VectorXi y_val;
  Eigen::MatrixXd X_zero;  // all labeled `unseen`
  std::map<int, Eigen::VectorXd> attributes;  // class -> a(c)

  int rows() const { return class_max - class_min + 1; }
  int row_of(int cls) const { return cls - class_min; }
};

/// Synthetic task whose class prototypes are linear in the attribute vector
/// a(c) = (c, 1), so attribute extrapolation to the unseen class is exact.
/// Train noise deliberately exceeds validation noise, which keeps the
/// pseudocode trigger L_train > L_val firing.
ToyTask make_toy_task(std::uint64_t seed, int samples_per_class = 24,
                      double sigma_train = 1.0, double sigma_val = 0.4);

/// Mean squared distance between each sample and its class prototype row of M
/// (class c lives in row c - class_min).
double prototype_loss(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X,
                      const Eigen::VectorXi& y, int class_min);

/// Gradient of prototype_loss with respect to M (only rows with samples move).
Eigen::MatrixXd prototype_loss_grad(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X,
                                    const Eigen::VectorXi& y, int class_min);

/// argmax_c  M.row(c) . x - 0.5 |M.row(c)|^2  == nearest prototype.
/// Returns the row index of the winning class.
int predict(const Eigen::MatrixXd& M, const Eigen::VectorXd& x);

/// Fraction of samples whose predicted row matches y(i) - class_min.
double accuracy(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                int class_min);

/// Plain gradient descent: W - lr * grad. Throws NonFiniteGradient.
Eigen::MatrixXd reactive_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& grad,
                              double lr);

// Meta-level signals handed to the proactive optimizer: the running losses
// and the effective prototype rows of the classes seen so far.
struct MetaInfo {
  double train_loss = 0;
  double val_loss = 0;
  std::vector<int> seen_classes;
  Eigen::MatrixXd seen_rows;  // one row per entry of seen_classes, from W + W_star
};

/// Writes the aux class's row of W_star as the attribute-weighted combination
/// of the seen prototype rows (weights solve a(aux) = sum alpha_c a(c) in the
/// least-squares sense). Every other entry is returned unchanged; with no aux
/// class the input is returned as-is. Throws UnknownClass when `attributes`
/// lacks aux or a seen class.
Eigen::MatrixXd proactive_step(const Eigen::MatrixXd& W_star, std::optional<int> aux_class,
                               const std::map<int, Eigen::VectorXd>& attributes,
                               const MetaInfo& meta, const ToyTask& task);

struct TrajectoryPoint {
  int step = 0;
  double L_train = 0;
  double L_val = 0;
  bool proactive_fired = false;
  bool zero_shot_correct = false;
  double w_star_unseen_row_norm = 0;
};

struct LfzslConfig {
  double lr = 0.05;
  int max_steps = 300;
  bool proactive_enabled = true;
  // The pseudocode fires the proactive update when train loss EXCEEDS
  // validation loss; set flip_trigger to use the conventional direction.
  bool flip_trigger = false;
  std::filesystem::path trajectory_path;  // empty = no log file
};

struct LfzslResult {
  enum class Outcome { ZeroShotSolved, BudgetExceeded } outcome = Outcome::BudgetExceeded;
  int steps = 0;
  double zero_shot_accuracy = 0;
  bool proactive_ever_fired = false;
  std::vector<TrajectoryPoint> trajectory;
  Eigen::MatrixXd W;
  Eigen::MatrixXd W_star;
};

/// Interleaves reactive epochs with trigger-gated proactive updates until the
/// unseen class is classified perfectly or the step budget runs out (reported
/// as an outcome, not an error).
LfzslResult run_lfzsl(const ToyTask& task, const LfzslConfig& cfg = {});

}  // namespace gw
