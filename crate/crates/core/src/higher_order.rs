//! Higher-order calculus and braiding (placeholder).
