#include "gw/proactive.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "gw/rng.hpp"

namespace gw {

ToyTask make_toy_task(std::uint64_t seed, int samples_per_class, double sigma_train,
                      double sigma_val) {
  ToyTask task;
  auto rng = make_rng(seed);
  // Box-Muller over a fixed 53-bit mapping, so the task is bit-reproducible
  // across standard libraries (distribution objects are not).
  auto unit_pos = [&rng] { return (double(rng() >> 11) + 1.0) * 0x1.0p-53; };
  auto gauss = [&] {
    return std::sqrt(-2.0 * std::log(unit_pos())) *
           std::cos(2.0 * std::numbers::pi * unit_pos());
  };

  // Prototypes linear in a(c) = (c, 1): mu(c) = B * a(c).
  Eigen::MatrixXd B(task.d, 2);
  B << 6.0, -10.0,
       -3.0, 40.0;
  auto proto = [&](int cls) { return Eigen::VectorXd(B * Eigen::Vector2d(cls, 1.0)); };

  for (int cls = task.class_min; cls <= task.class_max; ++cls)
    task.attributes[cls] = Eigen::Vector2d(cls, 1.0);

  const int seen = task.unseen - task.class_min;  // classes 3..8
  const int train_n = seen * samples_per_class;
  const int val_n = seen * (samples_per_class / 3);
  task.X_train.resize(train_n, task.d);
  task.y_train.resize(train_n);
  task.X_val.resize(val_n, task.d);
  task.y_val.resize(val_n);
  task.X_zero.resize(samples_per_class, task.d);

  int t = 0, v = 0;
  for (int cls = task.class_min; cls < task.unseen; ++cls) {
    for (int i = 0; i < samples_per_class; ++i, ++t) {
      for (int j = 0; j < task.d; ++j)
        task.X_train(t, j) = proto(cls)(j) + sigma_train * gauss();
      task.y_train(t) = cls;
    }
    for (int i = 0; i < samples_per_class / 3; ++i, ++v) {
      for (int j = 0; j < task.d; ++j)
        task.X_val(v, j) = proto(cls)(j) + sigma_val * gauss();
      task.y_val(v) = cls;
    }
  }
  for (int i = 0; i < samples_per_class; ++i)
    for (int j = 0; j < task.d; ++j)
      task.X_zero(i, j) = proto(task.unseen)(j) + sigma_val * gauss();
  return task;
}

double prototype_loss(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X,
                      const Eigen::VectorXi& y, int class_min) {
  double sum = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    sum += (X.row(i) - M.row(y(i) - class_min)).squaredNorm();
  return sum / double(X.rows());
}

Eigen::MatrixXd prototype_loss_grad(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X,
                                    const Eigen::VectorXi& y, int class_min) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    grad.row(y(i) - class_min) += 2.0 * (M.row(y(i) - class_min) - X.row(i));
  return grad / double(X.rows());
}

int predict(const Eigen::MatrixXd& M, const Eigen::VectorXd& x) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < M.rows(); ++c) {
    double score = M.row(c).dot(x) - 0.5 * M.row(c).squaredNorm();
    if (score > best_score) {
      best_score = score;
      best = int(c);
    }
  }
  return best;
}

double accuracy(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                int class_min) {
  if (X.rows() == 0) return 0;
  int hits = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    hits += predict(M, X.row(i).transpose()) == y(i) - class_min;
  return double(hits) / double(X.rows());
}

Eigen::MatrixXd reactive_step(const Eigen::MatrixXd& W, const Eigen::MatrixXd& grad,
                              double lr) {
  if (!grad.allFinite()) throw NonFiniteGradient("gradient contains non-finite entries");
  if (!(lr > 0)) throw Error("reactive_step: learning rate must be positive");
  return W - lr * grad;
}

Eigen::MatrixXd proactive_step(const Eigen::MatrixXd& W_star, std::optional<int> aux_class,
                               const std::map<int, Eigen::VectorXd>& attributes,
                               const MetaInfo& meta, const ToyTask& task) {
  if (!aux_class) return W_star;
  auto aux_it = attributes.find(*aux_class);
  if (aux_it == attributes.end())
    throw UnknownClass("no attribute vector for class " + std::to_string(*aux_class));

  // Solve a(aux) = A alpha over the seen attribute columns, then transfer the
  // same combination to the prototype rows.
  const Eigen::Index a_dim = aux_it->second.size();
  Eigen::MatrixXd A(a_dim, Eigen::Index(meta.seen_classes.size()));
  for (std::size_t i = 0; i < meta.seen_classes.size(); ++i) {
    auto it = attributes.find(meta.seen_classes[i]);
    if (it == attributes.end())
      throw UnknownClass("no attribute vector for seen class " +
                         std::to_string(meta.seen_classes[i]));
    A.col(Eigen::Index(i)) = it->second;
  }
  Eigen::VectorXd alpha = A.completeOrthogonalDecomposition().solve(aux_it->second);

  Eigen::MatrixXd out = W_star;
  out.row(task.row_of(*aux_class)) = alpha.transpose() * meta.seen_rows;
  return out;
}

LfzslResult run_lfzsl(const ToyTask& task, const LfzslConfig& cfg) {
  LfzslResult res;
  res.W = Eigen::MatrixXd::Zero(task.rows(), task.d);
  res.W_star = Eigen::MatrixXd::Zero(task.rows(), task.d);

  std::vector<int> seen_classes;
  for (int c = task.class_min; c <= task.class_max; ++c)
    if (c != task.unseen) seen_classes.push_back(c);

  for (int step = 0; step < cfg.max_steps; ++step) {
    Eigen::MatrixXd M = res.W + res.W_star;
    res.W = reactive_step(
        res.W, prototype_loss_grad(M, task.X_train, task.y_train, task.class_min), cfg.lr);

    M = res.W + res.W_star;
    TrajectoryPoint pt;
    pt.step = step;
    pt.L_train = prototype_loss(M, task.X_train, task.y_train, task.class_min);
    pt.L_val = prototype_loss(M, task.X_val, task.y_val, task.class_min);

    bool trigger = cfg.flip_trigger ? pt.L_val > pt.L_train : pt.L_train > pt.L_val;
    if (cfg.proactive_enabled && trigger) {
      MetaInfo meta;
      meta.train_loss = pt.L_train;
      meta.val_loss = pt.L_val;
      meta.seen_classes = seen_classes;
      meta.seen_rows.resize(Eigen::Index(seen_classes.size()), task.d);
      for (std::size_t i = 0; i < seen_classes.size(); ++i)
        meta.seen_rows.row(Eigen::Index(i)) = M.row(task.row_of(seen_classes[i]));
      res.W_star = proactive_step(res.W_star, task.unseen, task.attributes, meta, task);
      pt.proactive_fired = true;
      res.proactive_ever_fired = true;
      M = res.W + res.W_star;
    }

    Eigen::VectorXi y_unseen = Eigen::VectorXi::Constant(task.X_zero.rows(), task.unseen);
    res.zero_shot_accuracy = accuracy(M, task.X_zero, y_unseen, task.class_min);
    pt.zero_shot_correct = res.zero_shot_accuracy == 1.0;
    pt.w_star_unseen_row_norm = res.W_star.row(task.row_of(task.unseen)).norm();
    res.trajectory.push_back(pt);
    res.steps = step + 1;

    if (pt.zero_shot_correct) {
      res.outcome = LfzslResult::Outcome::ZeroShotSolved;
      break;
    }
  }

  if (!cfg.trajectory_path.empty()) {
    std::ofstream f(cfg.trajectory_path, std::ios::binary);
    if (!f) throw Error("cannot open for write: " + cfg.trajectory_path.string());
    for (const auto& pt : res.trajectory) {
      nlohmann::ordered_json j;
      j["step"] = pt.step;
      j["L_train"] = pt.L_train;
      j["L_val"] = pt.L_val;
      j["proactive_fired"] = pt.proactive_fired;
      j["zero_shot_correct"] = pt.zero_shot_correct;
      j["w_star_unseen_row_norm"] = pt.w_star_unseen_row_norm;
      f << j.dump() << '\n';
    }
  }
  return res;
}

}  // namespace gw
