#pragma once

#include <memory>
#include <string>

namespace nsf {

// Arithmetic expression in x: + - * / ^, unary minus, parentheses, sin cos exp log,
// constants pi and e.
class Expr {
 public:
  // Throws Error(Validation) with the offending position.
  static Expr parse(const std::string& text);

  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace nsf
