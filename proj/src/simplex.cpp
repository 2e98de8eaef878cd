#include <algorithm>
#include <sstream>

#include "solver_core.hpp"

namespace ple {
namespace solver {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;
using BigInt = boost::multiprecision::cpp_int;

BigInt rat_floor(const Rat& r) {
  BigInt n = numerator(r), d = denominator(r);
  BigInt q = n / d;
  if (n % d != 0 && (n < 0) != (d < 0)) q -= 1;
  return q;
}

bool is_integer(const Rat& r) { return denominator(r) == 1; }

}  // namespace

Simplex::Simplex(int64_t* budget) : budget_(budget) {}

int Simplex::var_of_atom(int atom) {
  auto it = atom_to_var_.find(atom);
  if (it != atom_to_var_.end()) return it->second;
  int v = (int)vars_.size();
  vars_.push_back({});
  var_to_atom_.push_back(atom);
  atom_to_var_.emplace(atom, v);
  return v;
}

std::vector<int> Simplex::atom_vars() const {
  std::vector<int> out;
  for (size_t v = 0; v < vars_.size(); v++)
    if (var_to_atom_[v] >= 0) out.push_back(var_to_atom_[v]);
  return out;
}

Rat Simplex::value(int atom) const {
  auto it = atom_to_var_.find(atom);
  if (it == atom_to_var_.end()) return Rat(0);
  return vars_[it->second].beta;
}

// Expand a linear combination over atoms into one over current nonbasic
// vars (substituting rows of basic vars).
int Simplex::slack_of(const std::vector<std::pair<int, Rat>>& terms) {
  std::ostringstream key;
  for (const auto& [a, c] : terms) key << a << "*" << c.str() << "|";
  auto it = slack_table_.find(key.str());
  if (it != slack_table_.end()) return it->second;

  std::map<int, Rat> row;
  Rat beta(0);
  for (const auto& [a, c] : terms) {
    int v = var_of_atom(a);
    beta += c * vars_[v].beta;
    if (vars_[v].basic) {
      for (const auto& [w, cw] : rows_[vars_[v].row]) {
        Rat nc = row[w] + c * cw;
        if (nc == 0) row.erase(w); else row[w] = nc;
      }
    } else {
      Rat nc = row[v] + c;
      if (nc == 0) row.erase(v); else row[v] = nc;
    }
  }
  int s = (int)vars_.size();
  vars_.push_back({});
  var_to_atom_.push_back(-1);
  vars_[s].basic = true;
  vars_[s].row = (int)rows_.size();
  vars_[s].beta = beta;
  rows_.push_back(std::move(row));
  row_basic_.push_back(s);
  slack_table_.emplace(key.str(), s);
  return s;
}

void Simplex::update_nonbasic(int v, const Rat& nv) {
  Rat delta = nv - vars_[v].beta;
  if (delta == 0) return;
  vars_[v].beta = nv;
  for (size_t r = 0; r < rows_.size(); r++) {
    auto it = rows_[r].find(v);
    if (it != rows_[r].end())
      vars_[row_basic_[r]].beta += it->second * delta;
  }
}

bool Simplex::add_upper(int v, const Rat& b) {
  if (vars_[v].ub && *vars_[v].ub <= b) return true;
  vars_[v].ub = b;
  if (vars_[v].lb && *vars_[v].lb > b) return false;
  if (!vars_[v].basic && vars_[v].beta > b) update_nonbasic(v, b);
  return true;
}

bool Simplex::add_lower(int v, const Rat& b) {
  if (vars_[v].lb && *vars_[v].lb >= b) return true;
  vars_[v].lb = b;
  if (vars_[v].ub && *vars_[v].ub < b) return false;
  if (!vars_[v].basic && vars_[v].beta < b) update_nonbasic(v, b);
  return true;
}

bool Simplex::assert_le(const LinForm& f) {
  if (f.terms.empty()) return f.k <= 0;
  return add_upper(slack_of(f.terms), -f.k);
}

bool Simplex::assert_eq(const LinForm& f) {
  if (f.terms.empty()) return f.k == 0;
  int s = slack_of(f.terms);
  return add_upper(s, -f.k) && add_lower(s, -f.k);
}

void Simplex::pivot(int r, int n) {
  int b = row_basic_[r];
  std::map<int, Rat> old = std::move(rows_[r]);
  Rat a = old[n];
  old.erase(n);
  // n = (b - sum old) / a
  std::map<int, Rat> nrow;
  nrow[b] = Rat(1) / a;
  for (const auto& [w, c] : old) nrow[w] = -c / a;
  rows_[r] = nrow;
  row_basic_[r] = n;
  vars_[n].basic = true;
  vars_[n].row = r;
  vars_[b].basic = false;
  vars_[b].row = -1;
  // Substitute n in every other row.
  for (size_t j = 0; j < rows_.size(); j++) {
    if ((int)j == r) continue;
    auto it = rows_[j].find(n);
    if (it == rows_[j].end()) continue;
    Rat c = it->second;
    rows_[j].erase(it);
    for (const auto& [w, cw] : nrow) {
      Rat nc = rows_[j][w] + c * cw;
      if (nc == 0) rows_[j].erase(w); else rows_[j][w] = nc;
    }
  }
}

bool Simplex::fix_basics() {
  for (size_t r = 0; r < rows_.size(); r++) {
    Rat v(0);
    for (const auto& [w, c] : rows_[r]) v += c * vars_[w].beta;
    vars_[row_basic_[r]].beta = v;
  }
  return true;
}

bool Simplex::check() {
  while (true) {
    if (--(*budget_) <= 0) return true;  // caller consults out_of_budget()
    // Smallest-index violated basic (Bland).
    int br = -1;
    bool need_up = false;
    for (size_t r = 0; r < rows_.size(); r++) {
      int b = row_basic_[r];
      if (vars_[b].lb && vars_[b].beta < *vars_[b].lb) {
        if (br < 0 || b < row_basic_[br]) { br = (int)r; need_up = true; }
      } else if (vars_[b].ub && vars_[b].beta > *vars_[b].ub) {
        if (br < 0 || b < row_basic_[br]) { br = (int)r; need_up = false; }
      }
    }
    if (br < 0) return true;
    int b = row_basic_[br];
    Rat target = need_up ? *vars_[b].lb : *vars_[b].ub;
    // Smallest-index suitable nonbasic.
    int pick = -1;
    Rat pa;
    for (const auto& [w, c] : rows_[br]) {
      bool ok;
      if (need_up)
        ok = (c > 0 && (!vars_[w].ub || vars_[w].beta < *vars_[w].ub)) ||
             (c < 0 && (!vars_[w].lb || vars_[w].beta > *vars_[w].lb));
      else
        ok = (c < 0 && (!vars_[w].ub || vars_[w].beta < *vars_[w].ub)) ||
             (c > 0 && (!vars_[w].lb || vars_[w].beta > *vars_[w].lb));
      if (ok && (pick < 0 || w < pick)) { pick = w; pa = c; }
    }
    if (pick < 0) return false;  // infeasible
    // pivotAndUpdate
    Rat theta = (target - vars_[b].beta) / pa;
    vars_[b].beta = target;
    vars_[pick].beta += theta;
    for (size_t j = 0; j < rows_.size(); j++) {
      if ((int)j == (int)br) continue;
      auto it = rows_[j].find(pick);
      if (it != rows_[j].end())
        vars_[row_basic_[j]].beta += it->second * theta;
    }
    pivot(br, pick);
  }
}

std::optional<Rat> Simplex::maximize(const LinForm& f) {
  if (!check()) return Rat(0);  // unreachable for feasible callers
  // Objective over atoms -> vars.
  std::map<int, Rat> obj;
  for (const auto& [a, c] : f.terms) {
    int v = var_of_atom(a);
    Rat nc = obj[v] + c;
    if (nc == 0) obj.erase(v); else obj[v] = nc;
  }
  while (true) {
    if (--(*budget_) <= 0) break;
    // Express objective over nonbasics.
    std::map<int, Rat> d;
    for (const auto& [v, c] : obj) {
      if (vars_[v].basic) {
        for (const auto& [w, cw] : rows_[vars_[v].row]) {
          Rat nc = d[w] + c * cw;
          if (nc == 0) d.erase(w); else d[w] = nc;
        }
      } else {
        Rat nc = d[v] + c;
        if (nc == 0) d.erase(v); else d[v] = nc;
      }
    }
    // Entering var (Bland).
    int j = -1;
    bool up = false;
    for (const auto& [w, c] : d) {
      if (c > 0 && (!vars_[w].ub || vars_[w].beta < *vars_[w].ub)) {
        j = w; up = true; break;
      }
      if (c < 0 && (!vars_[w].lb || vars_[w].beta > *vars_[w].lb)) {
        j = w; up = false; break;
      }
    }
    if (j < 0) break;  // optimal
    // Ratio test: own bound plus every basic var's bound in direction.
    std::optional<Rat> theta;  // max step >= 0
    int limit_row = -1;
    if (up && vars_[j].ub) theta = *vars_[j].ub - vars_[j].beta;
    if (!up && vars_[j].lb) theta = vars_[j].beta - *vars_[j].lb;
    for (size_t r = 0; r < rows_.size(); r++) {
      auto it = rows_[r].find(j);
      if (it == rows_[r].end()) continue;
      int b = row_basic_[r];
      // beta_b moves by c*step*(up ? +1 : -1)
      Rat rate = up ? it->second : -it->second;
      if (rate > 0 && vars_[b].ub) {
        Rat room = (*vars_[b].ub - vars_[b].beta) / rate;
        if (!theta || room < *theta) { theta = room; limit_row = (int)r; }
      } else if (rate < 0 && vars_[b].lb) {
        Rat room = (*vars_[b].lb - vars_[b].beta) / rate;
        if (!theta || room < *theta) { theta = room; limit_row = (int)r; }
      }
    }
    if (!theta) return std::nullopt;  // unbounded
    Rat step = up ? *theta : -*theta;
    if (limit_row >= 0) {
      // Move and pivot the limiting basic out.
      int b = row_basic_[limit_row];
      vars_[j].beta += step;
      for (size_t r = 0; r < rows_.size(); r++) {
        auto it = rows_[r].find(j);
        if (it != rows_[r].end())
          vars_[row_basic_[r]].beta += it->second * step;
      }
      (void)b;
      pivot(limit_row, j);
    } else {
      update_nonbasic(j, vars_[j].beta + step);
    }
  }
  Rat val = f.k;
  for (const auto& [a, c] : f.terms) val += c * value(a);
  return val;
}

bool Simplex::entails_zero(const LinForm& f) {
  auto hi = maximize(f);
  if (!hi || *hi != 0) return false;
  auto lo = maximize(lin_scale(f, Rat(-1)));
  return lo && *lo == 0;
}

int Simplex::integerize(int depth, int* nodes) {
  if (--(*nodes) < 0 || depth < 0 || --(*budget_) <= 0) return -1;
  if (!check()) return 0;
  int v = -1;
  for (size_t i = 0; i < vars_.size(); i++) {
    if (var_to_atom_[i] >= 0 && !is_integer(vars_[i].beta)) {
      v = (int)i;
      break;
    }
  }
  if (v < 0) return 1;
  Rat bv = vars_[v].beta;
  BigInt fl = rat_floor(bv);
  bool unknown = false;
  auto slb = vars_[v].lb, sub = vars_[v].ub;
  if (add_upper(v, Rat(fl))) {
    int r = integerize(depth - 1, nodes);
    if (r == 1) return 1;
    if (r == -1) unknown = true;
  }
  vars_[v].lb = slb;
  vars_[v].ub = sub;
  if (add_lower(v, Rat(fl + 1))) {
    int r = integerize(depth - 1, nodes);
    if (r == 1) return 1;
    if (r == -1) unknown = true;
  }
  vars_[v].lb = slb;
  vars_[v].ub = sub;
  return unknown ? -1 : 0;
}

}  // namespace solver
}  // namespace ple
