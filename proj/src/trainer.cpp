#include "hcrn/trainer.hpp"

#include <fstream>

namespace hcrn {

namespace {

std::string cell(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

void write_history_csv(const std::string& path, const TrainHistory& h) {
  std::ofstream out(path);
  if (!out) throw InputError("history: cannot write " + path);
  out << "epoch,phase,train_loss,valid_loss,test_error\n";
  for (const EpochStats& st : h.epochs)
    out << st.epoch << "," << phase_name(h.phase) << "," << cell(st.train_loss)
        << "," << cell(st.valid_loss) << "," << cell(st.test_error) << "\n";
}

void write_compare_csv(const std::string& path, const CompareInitResult& r) {
  std::ofstream out(path);
  if (!out) throw InputError("compare: cannot write " + path);
  out << "# seeds=";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    if (i) out << ",";
    out << r.seeds[i];
  }
  out << "\n";
  out << "seed,arm,epoch,train_loss,test_loss\n";
  for (const CompareCurvePoint& p : r.points)
    out << p.seed << "," << p.arm << "," << p.epoch << "," << cell(p.train_loss)
        << "," << cell(p.test_loss) << "\n";
}

}  // namespace hcrn
