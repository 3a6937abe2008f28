#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace bogwatch::temp {

// Samples are rows.
using FeatureMatrix = std::vector<std::vector<double>>;

// ---------------------------------------------------------------- forest

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;          // <= 0 means unlimited
  int min_leaf = 2;
  int features_per_split = 0;  // 0 means ceil(sqrt(d))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int threads = 0;             // 0 means hardware concurrency
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf mean (also kept on internal nodes)
  int left = -1;
  int right = -1;
};

// Nodes are stored in pre-order: root first, the left subtree follows its
// parent directly.
struct Tree {
  std::vector<TreeNode> nodes;
  double predict(std::span<const double> x) const;
};

struct ForestModel {
  std::size_t n_features = 0;
  std::vector<Tree> trees;
  std::vector<double> importances;

  /// Mean of the per-tree leaf values. ShapeError on a feature-count mismatch.
  double predict(std::span<const double> x) const;
};

/// Bootstrap-sampled regression forest with variance-reduction splits.
/// Rows are put in a canonical order first, so the result does not depend on
/// the order samples are supplied in.
ForestModel train_random_forest(const FeatureMatrix& X, std::span<const double> y,
                                const ForestConfig& cfg = {});

double predict_forest(const ForestModel& model, std::span<const double> x);

/// Names by descending importance; ties keep feature order.
std::vector<std::string> rank_features(const ForestModel& model, std::span<const std::string> names);

// ---------------------------------------------------------------- mlp

struct MlpConfig {
  std::vector<int> hidden{32, 16};
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch = 32;
  std::uint64_t seed = 0;
};

/// tanh hidden layers, identity output. Inputs and target are standardized
/// with stored statistics; the network itself works in standardized units.
class MlpModel {
 public:
  MlpModel() = default;
  /// Glorot-initialised hidden layers, zero output layer, identity scaling.
  MlpModel(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::size_t n_features() const { return sizes_.empty() ? 0 : static_cast<std::size_t>(sizes_.front()); }

  double predict(std::span<const double> x) const;

  // Standardized-space access, used by training and the gradient check.
  // Rows of X are samples. Loss is the mean squared error.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& p);
  std::size_t parameter_count() const;
  double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;
  Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;

  std::vector<Eigen::MatrixXd> weights;  // layer l: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd x_mean, x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;

 private:
  std::vector<int> sizes_;
};

/// Mini-batch Adam on squared error. Throws DivergenceError naming the epoch
/// whose loss turned non-finite.
MlpModel train_mlp(const FeatureMatrix& X, std::span<const double> y, const MlpConfig& cfg = {});

// ---------------------------------------------------------------- files

using TempModel = std::variant<ForestModel, MlpModel>;

double predict(const TempModel& model, std::span<const double> x);
void save_model(const std::filesystem::path& path, const TempModel& model,
                std::span<const std::string> feature_names);
TempModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------- validation

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Contiguous test windows covering `test_fraction` of the time-ordered rows,
/// at evenly spaced offsets; everything else trains.
std::vector<Fold> temporal_folds(std::size_t n, int folds = 5, double test_fraction = 0.3);

struct CvResult {
  std::vector<double> r2;
  std::vector<double> mae;
  double mean_r2 = 0.0;
  double mean_mae = 0.0;
};

using Trainer = std::function<TempModel(const FeatureMatrix&, std::span<const double>)>;

CvResult cross_validate(const FeatureMatrix& X, std::span<const double> y, const Trainer& train,
                        int folds = 5, double test_fraction = 0.3);

}  // namespace bogwatch::temp
