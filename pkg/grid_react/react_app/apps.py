from django.apps import AppConfig


class ReactAppConfig(AppConfig):
    name = 'react_app'
    verbose_name = 'REACT attack containment and line-failure detection'
