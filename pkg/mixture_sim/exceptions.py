class SupportMismatch(ValueError):
    """Two distributions are defined over supports of different sizes."""

    def __init__(self, message="Supports differ", left_size=0, right_size=0):
        super().__init__(message)
        self.left_size = left_size
        self.right_size = right_size
