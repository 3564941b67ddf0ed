"""Cross-cutting helpers shared by all apps."""
