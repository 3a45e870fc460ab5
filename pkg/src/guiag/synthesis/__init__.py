"""Training-data synthesis: stage-1 standardization and stage-2 reasoning construction."""

from .client import ChatClient as ChatClient
from .client import DecodeParams as DecodeParams
from .client import OpenAIChatClient as OpenAIChatClient
from .client import StubChatClient as StubChatClient
from .pipeline import CorpusReport as CorpusReport
from .pipeline import make_client as make_client
from .pipeline import run_stage1 as run_stage1
from .pipeline import run_stage2 as run_stage2
from .pipeline import validate_corpus as validate_corpus
from .pipeline import write_corpus as write_corpus
from .reasoning import ReasoningSynthesizer as ReasoningSynthesizer
from .reasoning import ScreenDescription as ScreenDescription
from .records import RawStep as RawStep
from .records import RawTrajectory as RawTrajectory
from .records import SampleSource as SampleSource
from .records import SFTSample as SFTSample
from .standardize import RawRecord as RawRecord
from .standardize import refine_response as refine_response
from .standardize import standardize_record as standardize_record
from .templates import load_templates as load_templates
