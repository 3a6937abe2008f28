#include "bogwatch/temp_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "bogwatch/error.hpp"
#include "bogwatch/metrics.hpp"
#include "bogwatch/rng.hpp"

namespace bogwatch::temp {

namespace {

void check_training_data(const FeatureMatrix& X, std::span<const double> y) {
  if (X.empty() || y.empty()) throw DataError("no training samples");
  if (X.size() != y.size()) throw ShapeError("feature rows and targets differ in length");
  if (X.size() < 2) throw DataError("need at least 2 training samples");
  const std::size_t d = X.front().size();
  if (d == 0) throw DataError("no features");
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != d) throw ShapeError("ragged feature matrix at row " + std::to_string(i));
    for (double v : X[i]) {
      if (!std::isfinite(v)) throw DataError("non-finite feature at row " + std::to_string(i));
    }
    if (!std::isfinite(y[i])) throw DataError("non-finite target at row " + std::to_string(i));
  }
}

struct TreeBuilder {
  const FeatureMatrix& X;
  std::span<const double> y;
  const ForestConfig& cfg;
  std::size_t mtry;
  std::mt19937_64 rng;
  std::vector<double> gain_by_feature;
  Tree tree;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t n_left = 0;
  };

  Split best_split_on(std::vector<std::size_t>& idx, std::size_t f) const {
    Split best;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
    const std::size_t n = idx.size();
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, cfg.min_leaf));
    double total = 0.0;
    for (auto i : idx) total += y[i];
    double left = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      left += y[idx[k - 1]];
      const double xa = X[idx[k - 1]][f];
      const double xb = X[idx[k]][f];
      if (!(xa < xb) || k < min_leaf || n - k < min_leaf) continue;
      const double nl = static_cast<double>(k);
      const double nr = static_cast<double>(n - k);
      const double diff = left / nl - (total - left) / nr;
      const double gain = nl * nr / static_cast<double>(n) * diff * diff;
      if (gain > best.gain) {
        best.feature = static_cast<int>(f);
        best.threshold = xa + (xb - xa) / 2.0;
        if (!(best.threshold < xb)) best.threshold = xa;
        best.gain = gain;
        best.n_left = k;
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double lo = y[idx.front()], hi = lo, sum = 0.0;
    for (auto i : idx) {
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
      sum += y[i];
    }
    const double mean = lo == hi ? lo : std::clamp(sum / static_cast<double>(idx.size()), lo, hi);
    tree.nodes[id].value = mean;

    const bool depth_ok = cfg.max_depth <= 0 || depth < cfg.max_depth;
    const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, cfg.min_leaf));
    if (lo == hi || !depth_ok || idx.size() < 2 * min_leaf) return id;

    const std::size_t d = X.front().size();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    // Sampled features first; the rest only if none of those can split.
    Split best;
    std::vector<std::size_t> work = idx;
    for (std::size_t k = 0; k < d; ++k) {
      if (k == mtry && best.feature >= 0) break;
      const auto s = best_split_on(work, order[k]);
      if (s.feature >= 0 && s.gain > best.gain) best = s;
    }
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (X[i][best.feature] <= best.threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return id;

    gain_by_feature[best.feature] += best.gain;
    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = best.threshold;
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

}  // namespace

double Tree::predict(std::span<const double> x) const {
  if (nodes.empty()) throw ModelError("empty tree");
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].value;
}

double ForestModel::predict(std::span<const double> x) const {
  if (x.size() != n_features) {
    throw ShapeError("expected " + std::to_string(n_features) + " features, got " + std::to_string(x.size()));
  }
  if (trees.empty()) throw ModelError("forest has no trees");
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

double predict_forest(const ForestModel& model, std::span<const double> x) { return model.predict(x); }

ForestModel train_random_forest(const FeatureMatrix& X_in, std::span<const double> y_in, const ForestConfig& cfg) {
  check_training_data(X_in, y_in);
  if (cfg.n_trees < 1) throw DataError("n_trees must be positive");
  const std::size_t n = X_in.size();
  const std::size_t d = X_in.front().size();

  // Canonical row order: lexicographic on (features, target).
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (X_in[a] != X_in[b]) return X_in[a] < X_in[b];
    return y_in[a] < y_in[b];
  });
  FeatureMatrix X(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    X[i] = X_in[perm[i]];
    y[i] = y_in[perm[i]];
  }

  std::size_t mtry = cfg.features_per_split > 0
                         ? static_cast<std::size_t>(cfg.features_per_split)
                         : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  mtry = std::clamp<std::size_t>(mtry, 1, d);

  const std::size_t n_trees = static_cast<std::size_t>(cfg.n_trees);
  std::vector<Tree> trees(n_trees);
  std::vector<std::vector<double>> gains(n_trees, std::vector<double>(d, 0.0));

  auto grow = [&](std::size_t t) {
    TreeBuilder b{X, y, cfg, mtry, std::mt19937_64(derive_seed(cfg.seed, t)), std::vector<double>(d, 0.0), {}};
    std::vector<std::size_t> idx(n);
    if (cfg.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& i : idx) i = pick(b.rng);
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    b.build(std::move(idx), 0);
    trees[t] = std::move(b.tree);
    gains[t] = std::move(b.gain_by_feature);
  };

  std::size_t workers = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_trees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_trees; ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < n_trees; t += workers) grow(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  ForestModel model;
  model.n_features = d;
  model.trees = std::move(trees);
  model.importances.assign(d, 0.0);
  for (const auto& g : gains) {
    for (std::size_t f = 0; f < d; ++f) model.importances[f] += g[f];
  }
  const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : model.importances) v /= total;
  }
  return model;
}

std::vector<std::string> rank_features(const ForestModel& model, std::span<const std::string> names) {
  if (names.size() != model.importances.size()) throw ShapeError("feature name count does not match model");
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.importances[a] > model.importances[b]; });
  std::vector<std::string> out;
  for (auto i : order) out.push_back(names[i]);
  return out;
}

// ---------------------------------------------------------------- mlp

MlpModel::MlpModel(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2 || sizes_.back() != 1) throw ModelError("layer sizes must end in a single output");
  for (int s : sizes_) {
    if (s < 1) throw ModelError("layer sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  const std::size_t L = sizes_.size() - 1;
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]);
    if (l + 1 < L) {
      const double a = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
      std::uniform_real_distribution<double> u(-a, a);
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = u(rng);
      }
    }
    weights.push_back(std::move(W));
    biases.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
  x_mean = Eigen::VectorXd::Zero(sizes_.front());
  x_scale = Eigen::VectorXd::Ones(sizes_.front());
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Eigen::VectorXd MlpModel::parameters() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index i = 0; i < weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < weights[l].cols(); ++j) p[k++] = weights[l](i, j);
    }
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) p[k++] = biases[l][i];
  }
  return p;
}

void MlpModel::set_parameters(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != parameter_count()) throw ShapeError("parameter vector size mismatch");
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index i = 0; i < weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < weights[l].cols(); ++j) weights[l](i, j) = p[k++];
    }
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) biases[l][i] = p[k++];
  }
}

Eigen::VectorXd MlpModel::forward(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd a = X.transpose();  // features x samples
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z = (weights[l] * a).colwise() + biases[l];
    a = l + 1 < weights.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a.row(0).transpose();
}

double MlpModel::loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
  return (forward(X) - y).squaredNorm() / static_cast<double>(y.size());
}

Eigen::VectorXd MlpModel::gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
  const std::size_t L = weights.size();
  std::vector<Eigen::MatrixXd> acts;
  acts.push_back(X.transpose());
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (weights[l] * acts.back()).colwise() + biases[l];
    acts.push_back(l + 1 < L ? Eigen::MatrixXd(z.array().tanh()) : z);
  }
  const double n = static_cast<double>(y.size());
  Eigen::MatrixXd delta = (acts.back().row(0).transpose() - y).transpose() * (2.0 / n);
  std::vector<Eigen::MatrixXd> gW(L);
  std::vector<Eigen::VectorXd> gb(L);
  for (std::size_t l = L; l-- > 0;) {
    gW[l] = delta * acts[l].transpose();
    gb[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (weights[l].transpose() * delta).array() * (1.0 - acts[l].array().square());
    }
  }
  Eigen::VectorXd g(parameter_count());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < L; ++l) {
    for (Eigen::Index i = 0; i < gW[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < gW[l].cols(); ++j) g[k++] = gW[l](i, j);
    }
    for (Eigen::Index i = 0; i < gb[l].size(); ++i) g[k++] = gb[l][i];
  }
  return g;
}

double MlpModel::predict(std::span<const double> x) const {
  if (x.size() != n_features()) {
    throw ShapeError("expected " + std::to_string(n_features()) + " features, got " + std::to_string(x.size()));
  }
  Eigen::MatrixXd row(1, x.size());
  for (std::size_t j = 0; j < x.size(); ++j) row(0, j) = (x[j] - x_mean[j]) / x_scale[j];
  return forward(row)[0] * y_scale + y_mean;
}

MlpModel train_mlp(const FeatureMatrix& X, std::span<const double> y, const MlpConfig& cfg) {
  check_training_data(X, y);
  if (cfg.batch < 1) throw DataError("batch size must be positive");
  if (cfg.epochs < 0) throw DataError("epochs must be non-negative");
  const std::size_t n = X.size();
  const std::size_t d = X.front().size();

  std::vector<int> sizes{static_cast<int>(d)};
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(1);
  std::mt19937_64 rng(cfg.seed);
  MlpModel model(sizes, rng());

  Eigen::MatrixXd Xs(n, d);
  Eigen::VectorXd ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) Xs(i, j) = X[i][j];
    ys[i] = y[i];
  }
  model.x_mean = Xs.colwise().mean().transpose();
  model.x_scale.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt((Xs.col(j).array() - model.x_mean[j]).square().mean());
    model.x_scale[j] = sd > 0.0 ? sd : 1.0;
  }
  model.y_mean = ys.mean();
  const double ysd = std::sqrt((ys.array() - model.y_mean).square().mean());
  model.y_scale = ysd > 0.0 ? ysd : 1.0;
  for (std::size_t j = 0; j < d; ++j) Xs.col(j) = (Xs.col(j).array() - model.x_mean[j]) / model.x_scale[j];
  ys = (ys.array() - model.y_mean) / model.y_scale;

  // Adam
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Eigen::VectorXd p = model.parameters();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(p.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p.size());
  long step = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = std::min(static_cast<std::size_t>(cfg.batch), n);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t count = std::min(bs, n - start);
      Eigen::MatrixXd xb(count, d);
      Eigen::VectorXd yb(count);
      for (std::size_t k = 0; k < count; ++k) {
        xb.row(k) = Xs.row(order[start + k]);
        yb[k] = ys[order[start + k]];
      }
      model.set_parameters(p);
      const double l = model.loss(xb, yb);
      if (!std::isfinite(l)) throw DivergenceError(epoch);
      epoch_loss += l * static_cast<double>(count);
      const Eigen::VectorXd g = model.gradient(xb, yb);
      ++step;
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      p.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    }
    if (!std::isfinite(epoch_loss) || !p.allFinite()) throw DivergenceError(epoch);
  }
  model.set_parameters(p);
  return model;
}

// ---------------------------------------------------------------- files

double predict(const TempModel& model, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& W) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < W.cols(); ++j) r.push_back(W(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const json& a, Eigen::Index expected) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected) throw ModelError("vector size mismatch");
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v[i] = a.at(i).get<double>();
  return v;
}

void write_tree(const Tree& t, int i, json& out) {
  const auto& n = t.nodes[i];
  out.push_back(json::array({n.feature, n.threshold, n.value}));
  if (n.feature >= 0) {
    write_tree(t, n.left, out);
    write_tree(t, n.right, out);
  }
}

int read_tree(const json& nodes, std::size_t& pos, Tree& t, std::size_t n_features) {
  if (pos >= nodes.size()) throw ModelError("truncated tree");
  const auto& a = nodes.at(pos++);
  TreeNode node;
  node.feature = a.at(0).get<int>();
  node.threshold = a.at(1).get<double>();
  node.value = a.at(2).get<double>();
  if (node.feature >= static_cast<int>(n_features)) throw ModelError("split feature out of range");
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.push_back(node);
  if (node.feature >= 0) {
    const int l = read_tree(nodes, pos, t, n_features);
    const int r = read_tree(nodes, pos, t, n_features);
    t.nodes[id].left = l;
    t.nodes[id].right = r;
  }
  return id;
}

}  // namespace

void save_model(const std::filesystem::path& path, const TempModel& model, std::span<const std::string> names) {
  json j;
  j["feature_names"] = std::vector<std::string>(names.begin(), names.end());
  if (const auto* f = std::get_if<ForestModel>(&model)) {
    j["kind"] = "forest";
    j["n_features"] = f->n_features;
    j["importances"] = f->importances;
    json trees = json::array();
    for (const auto& t : f->trees) {
      json nodes = json::array();
      if (!t.nodes.empty()) write_tree(t, 0, nodes);
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  } else {
    const auto& m = std::get<MlpModel>(model);
    j["kind"] = "mlp";
    j["layer_sizes"] = m.layer_sizes();
    json layers = json::array();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      layers.push_back({{"weights", to_json(m.weights[l])}, {"biases", to_json(m.biases[l])}});
    }
    j["layers"] = std::move(layers);
    j["x_mean"] = to_json(m.x_mean);
    j["x_scale"] = to_json(m.x_scale);
    j["y_mean"] = m.y_mean;
    j["y_scale"] = m.y_scale;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

TempModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path.string());
  std::ifstream in(path);
  json j;
  try {
    in >> j;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "forest") {
      ForestModel f;
      f.n_features = j.at("n_features").get<std::size_t>();
      f.importances = j.at("importances").get<std::vector<double>>();
      if (f.importances.size() != f.n_features) throw ModelError("importance count mismatch");
      for (const auto& nodes : j.at("trees")) {
        Tree t;
        std::size_t pos = 0;
        read_tree(nodes, pos, t, f.n_features);
        if (pos != nodes.size()) throw ModelError("trailing tree nodes");
        f.trees.push_back(std::move(t));
      }
      return f;
    }
    if (kind == "mlp") {
      const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
      MlpModel m(sizes, 0);
      const auto& layers = j.at("layers");
      if (layers.size() + 1 != sizes.size()) throw ModelError("layer count mismatch");
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& w = layers[l].at("weights");
        if (w.size() != static_cast<std::size_t>(sizes[l + 1])) throw ModelError("weight rows mismatch");
        for (int i = 0; i < sizes[l + 1]; ++i) {
          m.weights[l].row(i) = vector_from(w.at(i), sizes[l]).transpose();
        }
        m.biases[l] = vector_from(layers[l].at("biases"), sizes[l + 1]);
      }
      m.x_mean = vector_from(j.at("x_mean"), sizes.front());
      m.x_scale = vector_from(j.at("x_scale"), sizes.front());
      m.y_mean = j.at("y_mean").get<double>();
      m.y_scale = j.at("y_scale").get<double>();
      return m;
    }
    throw ModelError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- validation

std::vector<Fold> temporal_folds(std::size_t n, int folds, double test_fraction) {
  if (folds < 1) throw DataError("fold count must be positive");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw DataError("test fraction must be in (0, 1)");
  const auto m = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (m < 2 || n - m < 2) throw DataError("too few samples for temporal folds");
  std::vector<Fold> out;
  for (int k = 0; k < folds; ++k) {
    const std::size_t start =
        folds == 1 ? 0
                   : static_cast<std::size_t>(std::llround(static_cast<double>(k) * static_cast<double>(n - m) /
                                                           static_cast<double>(folds - 1)));
    Fold f;
    for (std::size_t i = 0; i < n; ++i) (i >= start && i < start + m ? f.test : f.train).push_back(i);
    out.push_back(std::move(f));
  }
  return out;
}

CvResult cross_validate(const FeatureMatrix& X, std::span<const double> y, const Trainer& train, int folds,
                        double test_fraction) {
  if (X.size() != y.size()) throw ShapeError("feature rows and targets differ in length");
  CvResult r;
  for (const auto& f : temporal_folds(X.size(), folds, test_fraction)) {
    FeatureMatrix xt;
    std::vector<double> yt;
    for (auto i : f.train) {
      xt.push_back(X[i]);
      yt.push_back(y[i]);
    }
    const TempModel model = train(xt, yt);
    std::vector<double> truth, pred;
    for (auto i : f.test) {
      truth.push_back(y[i]);
      pred.push_back(predict(model, X[i]));
    }
    r.r2.push_back(metrics::r_squared(truth, pred));
    r.mae.push_back(metrics::mean_absolute_error(truth, pred));
  }
  r.mean_r2 = std::accumulate(r.r2.begin(), r.r2.end(), 0.0) / static_cast<double>(r.r2.size());
  r.mean_mae = std::accumulate(r.mae.begin(), r.mae.end(), 0.0) / static_cast<double>(r.mae.size());
  return r;
}

}  // namespace bogwatch::temp
