#ifndef ELSIM_SKILL_ID_HPP_
#define ELSIM_SKILL_ID_HPP_

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace elsim {

// Identifies a node in the skill tree by its letter sequence. The empty
// sequence is the root; a child extends its parent by one letter.
class SkillId {
 public:
  SkillId() = default;
  explicit SkillId(std::vector<int> letters);

  static SkillId root() { return SkillId{}; }

  // Parses a dash-joined rendering such as "0-1-3". The empty string and
  // "root" both parse to the root id.
  static SkillId parse(const std::string& text);

  int depth() const { return static_cast<int>(letters_.size()); }
  bool is_root() const { return letters_.empty(); }

  SkillId parent() const;       // throws on root
  SkillId child(int letter) const;
  int letter(int i) const { return letters_.at(static_cast<std::size_t>(i)); }
  int last_letter() const;      // throws on root
  bool is_prefix_of(const SkillId& other) const;

  const std::vector<int>& letters() const { return letters_; }

  // Dash-joined letters, e.g. "0-1-3". The root renders as "".
  std::string str() const;

  auto operator<=>(const SkillId&) const = default;

 private:
  std::vector<int> letters_;
};

std::ostream& operator<<(std::ostream& out, const SkillId& id);

}  // namespace elsim

#endif  // ELSIM_SKILL_ID_HPP_
