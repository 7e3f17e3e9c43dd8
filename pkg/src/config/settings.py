"""
Filename: settings.py
Path: src/config/settings.py
Description: Основные настройки проекта слияния, трекинга и оценки детекций стволов
"""
import os
from pathlib import Path
import environ

# Инициализация environ
env = environ.Env(
    DEBUG=(bool, False)
)

# Build paths
BASE_DIR = Path(__file__).resolve().parent.parent
PROJECT_ROOT = BASE_DIR.parent

# Чтение .env файла
environ.Env.read_env(os.path.join(PROJECT_ROOT, '.env'))

# Security
SECRET_KEY = env('SECRET_KEY', default='django-insecure-dev-key-change-in-production')
DEBUG = env('DEBUG')

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',

    # Локальные приложения
    'apps.geometry',
    'apps.records',
    'apps.fusion',
    'apps.tracking',
    'apps.metrics',
    'apps.annotation',
    'apps.simulate',
    'apps.pipeline',
]

# Internationalization
LANGUAGE_CODE = 'ru-ru'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': env('LOG_LEVEL', default='INFO'),
            'propagate': False,
        },
    },
}

# Слияние задач OOD и ISEG
TRUNK_FUSION = {
    'CONFIDENCE_THRESH': env.float('CONFIDENCE_THRESH', default=0.4),
    'TASK_MATCH_MIN_IOU': env.float('TASK_MATCH_MIN_IOU', default=0.1),
    'COMPONENT_MATCH_MIN_AFFINITY': env.float('COMPONENT_MATCH_MIN_AFFINITY', default=0.25),
    'UNMATCHED_POLICY': env('UNMATCHED_POLICY', default='keep_any'),
    'CONFIDENCE_MERGE': env('CONFIDENCE_MERGE', default='max'),
}

# Трекер (значения пресета bytetrack)
TRUNK_TRACKER = {
    'TRACKER_PRESET': env('TRACKER_PRESET', default='bytetrack'),
    'TRACK_HIGH_THRESH': env.float('TRACK_HIGH_THRESH', default=0.5),
    'TRACK_LOW_THRESH': env.float('TRACK_LOW_THRESH', default=0.1),
    'NEW_TRACK_THRESH': env.float('NEW_TRACK_THRESH', default=0.6),
    'MATCH_THRESH': env.float('MATCH_THRESH', default=0.8),
    'TRACK_BUFFER': env.int('TRACK_BUFFER', default=30),
    'MIN_HITS': env.int('MIN_HITS', default=1),
    'FRAME_RATE': env.float('FRAME_RATE', default=30.0),
    'FRAME_STEP': env.int('FRAME_STEP', default=1),
    'SECOND_MATCH_THRESH': env.float('SECOND_MATCH_THRESH', default=0.5),
    'UNCONFIRMED_MATCH_THRESH': env.float('UNCONFIRMED_MATCH_THRESH', default=0.7),
    'FUSE_SCORE': env.bool('FUSE_SCORE', default=False),
    # Шумы фильтра Калмана: доли высоты бокса и радианы
    'KF_POSITION_NOISE': env.float('KF_POSITION_NOISE', default=1.0 / 20),
    'KF_VELOCITY_NOISE': env.float('KF_VELOCITY_NOISE', default=1.0 / 160),
    'KF_MEASUREMENT_NOISE': env.float('KF_MEASUREMENT_NOISE', default=1.0 / 20),
    'KF_ANGLE_NOISE': env.float('KF_ANGLE_NOISE', default=0.02),
    'KF_ANGLE_VELOCITY_NOISE': env.float('KF_ANGLE_VELOCITY_NOISE', default=0.005),
    'KF_ANGLE_MEASUREMENT_NOISE': env.float('KF_ANGLE_MEASUREMENT_NOISE', default=0.02),
}

# Модель шума симулятора
TRUNK_NOISE = {
    'POSITION_JITTER_PX': env.float('POSITION_JITTER_PX', default=0.0),
    'SIZE_JITTER_FRAC': env.float('SIZE_JITTER_FRAC', default=0.0),
    'ANGLE_JITTER_RAD': env.float('ANGLE_JITTER_RAD', default=0.0),
    'DROPOUT_PROB': env.float('DROPOUT_PROB', default=0.0),
    'CLUTTER_RATE': env.float('CLUTTER_RATE', default=0.0),
    'CONFIDENCE_TP_MEAN': env.float('CONFIDENCE_TP_MEAN', default=0.9),
    'CONFIDENCE_FP_MEAN': env.float('CONFIDENCE_FP_MEAN', default=0.3),
    'CONFIDENCE_SIGMA': env.float('CONFIDENCE_SIGMA', default=0.0),
}

# Метрики
TRUNK_METRICS = {
    'IOU_THRESH': env.float('IOU_THRESH', default=0.5),
    'RASTER_SIZE': env.int('RASTER_SIZE', default=1024),
    'THREADS': env.int('THREADS', default=1),
}

# Вывод компонентов из точечной разметки
TRUNK_ANNOTATION = {
    'ELLIPSE_RESIDUAL_FRAC': env.float('ELLIPSE_RESIDUAL_FRAC', default=0.02),
    'MIN_COMPONENT_WIDTH_PX': env.float('MIN_COMPONENT_WIDTH_PX', default=8.0),
    'SAMPLE_DENSITY': env.float('SAMPLE_DENSITY', default=0.5),
}

# Генератор синтетических сцен
TRUNK_SIMULATION = {
    'SEED': env.int('SEED', default=0),
    'IMAGE_WIDTH': env.int('IMAGE_WIDTH', default=1280),
    'IMAGE_HEIGHT': env.int('IMAGE_HEIGHT', default=720),
    'FRAMES': env.int('FRAMES', default=1),
    'VELOCITY_MIN_X': env.float('VELOCITY_MIN_X', default=0.0),
    'VELOCITY_MIN_Y': env.float('VELOCITY_MIN_Y', default=0.0),
    'VELOCITY_MAX_X': env.float('VELOCITY_MAX_X', default=0.0),
    'VELOCITY_MAX_Y': env.float('VELOCITY_MAX_Y', default=0.0),
    'ACCELERATION_SIGMA': env.float('ACCELERATION_SIGMA', default=0.0),
}
