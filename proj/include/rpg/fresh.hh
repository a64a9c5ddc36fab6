#ifndef RPG_FRESH_HH
#define RPG_FRESH_HH

#include <set>
#include <string>

namespace rpg::fol {

// Monotone fresh-name source. Game loading reserves every declared name so a
// fresh symbol can never collide with game variables or earlier picks.
class FreshSymbolSource {
 public:
  FreshSymbolSource() = default;

  void reserve(const std::string& name) { used_.insert(name); }

  std::string fresh(const std::string& base) {
    for (;;) {
      std::string cand = base + "$" + std::to_string(++counter_);
      if (used_.insert(cand).second) return cand;
    }
  }

  long counter() const { return counter_; }
  const std::set<std::string>& used() const { return used_; }

 private:
  long counter_ = 0;
  std::set<std::string> used_;
};

}  // namespace rpg::fol

#endif
