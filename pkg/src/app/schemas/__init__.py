"""
Pydantic schemas package
"""

from .corpus import *
from .error import *
from .evaluation import *
from .experiment import *
from .java import *
from .learn import *
from .metrics import *
from .sampling import *
from .dataset import *
