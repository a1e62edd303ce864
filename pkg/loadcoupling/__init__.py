from .errors import *
from .pipeline import *
from .netmodel import *
from .coupling import *
from .approx import *
from .milp import *
from .minl import *
from .bench import *
