"Package meta information"

__title__ = "marblekit"
__description__ = "Two-convex domains, mean curvature flow with surgery, marble graphs and knotted tori"
__url__ = "https://github.com/marblekit/marblekit"
__version__ = "0.3.0"
__author__ = "The marblekit developers"
__author_email__ = "marblekit@users.noreply.github.com"
__license__ = "Apache 2.0"
